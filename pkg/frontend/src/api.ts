/**
 * Thin client over the casenet HTTP API. Every state change a user makes
 * goes through postStep; the client never computes enablement or firing
 * itself. A 409 on postStep means the chosen option went stale (someone
 * else moved the case, or it terminated) and is surfaced as a value, not
 * an exception, because the worklist is expected to refresh and carry on.
 */

import type {
  AttributePayload,
  CaseSummaryJson,
  ModelSummaryJson,
  WorklistJson,
} from './types'

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>

export type StepOutcome =
  | { kind: 'applied'; summary: CaseSummaryJson }
  | { kind: 'stale'; detail: string }
  | { kind: 'rejected'; detail: string }

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail)
    this.name = 'ApiError'
  }
}

async function detailOf(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { detail?: string }
    return body.detail ?? response.statusText
  } catch {
    return response.statusText
  }
}

export class CaseApi {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`)
    if (!response.ok) {
      throw new ApiError(response.status, await detailOf(response))
    }
    return (await response.json()) as T
  }

  async listModels(): Promise<ModelSummaryJson[]> {
    const body = await this.getJson<{ models: ModelSummaryJson[] }>('/models')
    return body.models
  }

  async createCase(modelId: string): Promise<CaseSummaryJson> {
    const response = await this.fetchImpl(`${this.baseUrl}/cases`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ modelId }),
    })
    if (!response.ok) {
      throw new ApiError(response.status, await detailOf(response))
    }
    return (await response.json()) as CaseSummaryJson
  }

  getCase(caseId: string): Promise<CaseSummaryJson> {
    return this.getJson(`/cases/${caseId}`)
  }

  getWorklist(caseId: string): Promise<WorklistJson> {
    return this.getJson(`/cases/${caseId}/steps`)
  }

  async isTerminable(caseId: string): Promise<boolean> {
    const body = await this.getJson<{ terminable: boolean }>(`/cases/${caseId}/terminable`)
    return body.terminable
  }

  async postStep(
    caseId: string,
    optionId: string,
    attributes: AttributePayload,
  ): Promise<StepOutcome> {
    const response = await this.fetchImpl(`${this.baseUrl}/cases/${caseId}/steps`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ optionId, attributes }),
    })
    if (response.status === 409) {
      return { kind: 'stale', detail: await detailOf(response) }
    }
    if (response.status === 422) {
      return { kind: 'rejected', detail: await detailOf(response) }
    }
    if (!response.ok) {
      throw new ApiError(response.status, await detailOf(response))
    }
    return { kind: 'applied', summary: (await response.json()) as CaseSummaryJson }
  }
}
