/**
 * UI contract against a recorded API session of the full conference
 * walkthrough (frontend/test/fixtures/recorded-walkthrough.json, produced
 * by scripts/record_session.py against a live server):
 *
 *   1. the worklist shows exactly the options the API sent, at every step;
 *   2. submitting a step through the client produces byte-for-byte the
 *      request the API was recorded answering, and hands back that direct
 *      API response unchanged;
 *   3. the dashboard edge set equals the associations the API reported.
 */

import { describe, expect, it } from 'vitest'

import recording from './fixtures/recorded-walkthrough.json'
import { CaseApi } from '../src/api'
import { buildDashboard, edgeSet } from '../src/dashboard'
import { buildFormModel, validateAttributes } from '../src/forms'
import { renderWorklist } from '../src/render'
import { buildWorklist, flattenOptions } from '../src/worklist'
import type {
  AttributePayload,
  CaseSummaryJson,
  StepOptionJson,
  WorklistJson,
} from '../src/types'

interface RecordedStep {
  worklist: WorklistJson
  post: { optionId: string; attributes: AttributePayload }
  result: CaseSummaryJson
}

interface Recording {
  modelId: string
  created: CaseSummaryJson
  steps: RecordedStep[]
  final: {
    worklist: WorklistJson
    summary: CaseSummaryJson
    terminable: { terminable: boolean }
  }
}

const session = recording as unknown as Recording
const caseId = session.created.caseId

describe('worklist contract', () => {
  it('replays all nineteen steps', () => {
    expect(session.steps).toHaveLength(19)
  })

  it('shows exactly the options the API sent, at every recorded moment', () => {
    const byId = (xs: StepOptionJson[]) =>
      [...xs].sort((a, b) => a.optionId.localeCompare(b.optionId))
    for (const step of session.steps) {
      const view = buildWorklist(step.worklist)
      const shown = flattenOptions(view)
      expect(shown).toHaveLength(step.worklist.options.length)
      expect(byId(shown)).toEqual(byId(step.worklist.options))
    }
  })

  it('opens with a single start card', () => {
    const first = buildWorklist(session.steps[0]!.worklist)
    expect(first.kind).toBe('open')
    if (first.kind !== 'open') return
    expect(first.cards).toHaveLength(1)
    expect(first.cards[0]!.activity).toBe('conference scheduled')
  })

  it('offers one assign-reviewer entry per paper after submissions close', () => {
    const closeIndex = session.steps.findIndex(
      (step) => pickedOption(step).label === 'close submission',
    )
    expect(closeIndex).toBeGreaterThan(0)
    const after = buildWorklist(session.steps[closeIndex + 1]!.worklist)
    if (after.kind !== 'open') throw new Error('expected an open worklist')
    const card = after.cards.find((c) => c.activity === 'assign reviewer')
    expect(card).toBeDefined()
    const bindings = card!.entries.map((entry) => entry.bindingText).sort()
    expect(bindings).toEqual(['Paper=Paper#0', 'Paper=Paper#1'])
  })

  it('renders the terminated state distinctly with an empty worklist', () => {
    const final = buildWorklist(session.final.worklist)
    expect(final).toEqual({ kind: 'terminated' })
    expect(flattenOptions(final)).toEqual([])
    expect(renderWorklist(final)).toContain('banner-terminated')
  })
})

function pickedOption(step: RecordedStep): StepOptionJson {
  const option = step.worklist.options.find((o) => o.optionId === step.post.optionId)
  if (!option) {
    throw new Error('recorded post does not match any recorded option')
  }
  return option
}

describe('form submission contract', () => {
  it('accepts every recorded payload client-side', () => {
    for (const step of session.steps) {
      expect(validateAttributes(pickedOption(step), step.post.attributes)).toEqual([])
    }
  })

  it('generates a form for every object the step creates', () => {
    for (const step of session.steps) {
      const model = buildFormModel(pickedOption(step))
      const formKeys = model.forms
        .filter((form) => form.mode === 'created')
        .map((form) => form.key)
        .sort()
      const payloadKeys = Object.keys(step.post.attributes).sort()
      for (const key of payloadKeys) {
        expect(formKeys).toContain(key)
      }
    }
  })

  it('submits exactly the recorded request and passes the response through', async () => {
    for (const step of session.steps) {
      let sent: { url: string; body: unknown } | undefined
      const api = new CaseApi('http://api', (url, init) => {
        sent = { url, body: JSON.parse(init!.body as string) }
        return Promise.resolve(
          new Response(JSON.stringify(step.result), {
            status: 200,
            headers: { 'content-type': 'application/json' },
          }),
        )
      })
      const outcome = await api.postStep(caseId, step.post.optionId, step.post.attributes)
      expect(sent).toEqual({
        url: `http://api/cases/${caseId}/steps`,
        body: step.post,
      })
      expect(outcome).toEqual({ kind: 'applied', summary: step.result })
    }
  })
})

describe('dashboard contract', () => {
  it('edge set equals the associations token after every step', () => {
    for (const step of session.steps) {
      const model = buildDashboard(step.result, false)
      expect(model.edges).toEqual(step.result.associations)
      expect(edgeSet(model)).toHaveLength(step.result.associations.length)
    }
  })

  it('ends terminated with ten objects and twelve edges', () => {
    const final = buildDashboard(
      session.final.summary,
      session.final.terminable.terminable,
    )
    expect(final.status).toBe('terminated')
    expect(final.terminable).toBe(false)
    expect(final.groups.flatMap((group) => group.objects)).toHaveLength(10)
    expect(final.edges).toHaveLength(12)
  })

  it('starts with a single conference object', () => {
    const afterStart = buildDashboard(session.steps[0]!.result, false)
    expect(afterStart.groups).toHaveLength(1)
    expect(afterStart.groups[0]!.objects.map((record) => record.id)).toEqual([
      'Conference#0',
    ])
  })
})
