/**
 * Case dashboard view model: objects grouped by class with their current
 * state, the association edges, and the terminable badge. Edges are taken
 * verbatim from the case summary; the dashboard never derives links of
 * its own.
 */

import type { CaseSummaryJson, CaseStatus, ObjectRecordJson } from './types'

export interface ClassGroup {
  className: string
  objects: ObjectRecordJson[]
}

export interface DashboardModel {
  caseId: string
  modelId: string
  status: CaseStatus
  stepCount: number
  groups: ClassGroup[]
  edges: [string, string][]
  terminable: boolean
}

function objectIndex(id: string): number {
  const hash = id.lastIndexOf('#')
  return hash >= 0 ? Number(id.slice(hash + 1)) : 0
}

export function buildDashboard(
  summary: CaseSummaryJson,
  terminable: boolean,
): DashboardModel {
  const byClass = new Map<string, ObjectRecordJson[]>()
  for (const record of summary.objects) {
    const bucket = byClass.get(record.class)
    if (bucket) {
      bucket.push(record)
    } else {
      byClass.set(record.class, [record])
    }
  }
  const groups = [...byClass.entries()]
    .sort(([a], [b]) => a.localeCompare(b))
    .map(([className, objects]) => ({
      className,
      objects: [...objects].sort((a, b) => objectIndex(a.id) - objectIndex(b.id)),
    }))
  const edges = summary.associations.map(
    (pair): [string, string] => [pair[0]!, pair[1]!],
  )
  return {
    caseId: summary.caseId,
    modelId: summary.modelId,
    status: summary.status,
    stepCount: summary.steps,
    groups,
    edges,
    terminable,
  }
}

/** Edges as "a -- b" strings, for display and for the contract test. */
export function edgeSet(model: DashboardModel): string[] {
  return model.edges.map(([a, b]) => `${a} -- ${b}`)
}
