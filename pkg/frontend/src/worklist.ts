/**
 * Worklist view model: the server's option list grouped into one card per
 * activity, with input/output-set variants of the same activity shown as
 * badge-marked entries instead of separate cards.
 *
 * The grouping is presentation only. Every option the server sent appears
 * exactly once, with its optionId untouched; nothing is filtered, merged,
 * or reordered within a card.
 */

import type { BindingTokenJson, StepOptionJson, WorklistJson } from './types'

/** Set markers for variant badges, keyed by input/output-set index. */
export const SET_MARKERS = ['□', '○', '▲', '■'] as const

export interface VariantBadge {
  kind: 'in' | 'out' | 'condition'
  index: number
  marker: string
}

export interface WorklistEntry {
  option: StepOptionJson
  badges: VariantBadge[]
  bindingText: string
}

export interface WorklistCard {
  activity: string
  entries: WorklistEntry[]
}

export type WorklistView =
  | { kind: 'open'; status: 'initial' | 'running'; cards: WorklistCard[] }
  | { kind: 'terminated' }
  | { kind: 'missing'; detail: string }

export function markerFor(index: number): string {
  return SET_MARKERS[index % SET_MARKERS.length] as string
}

const VARIANT_SUFFIX = /\s\[(in|out)\s(\d+)\]$|\s\[(\d+)\]$/

/** Splits "submit paper [in 0]" into the activity name and its badges. */
export function parseLabel(label: string): { activity: string; badges: VariantBadge[] } {
  const badges: VariantBadge[] = []
  let rest = label
  for (;;) {
    const match = VARIANT_SUFFIX.exec(rest)
    if (!match) {
      break
    }
    if (match[3] !== undefined) {
      const index = Number(match[3])
      badges.unshift({ kind: 'condition', index, marker: markerFor(index) })
    } else {
      const index = Number(match[2])
      badges.unshift({ kind: match[1] as 'in' | 'out', index, marker: markerFor(index) })
    }
    rest = rest.slice(0, match.index)
  }
  return { activity: rest, badges }
}

export function tokenText(token: BindingTokenJson): string {
  if (token.type === 'id') {
    return `${token.class}#${token.index}`
  }
  return `{${token.ids.map((item) => `${item.class}#${item.index}`).join(', ')}}`
}

/** "v_Paper=Paper#1, s_Review={Review#0, Review#1}" without the prefixes. */
export function bindingText(binding: Record<string, BindingTokenJson>): string {
  return Object.keys(binding)
    .sort()
    .map((variable) => `${variable.replace(/^[vs]_/, '')}=${tokenText(binding[variable]!)}`)
    .join(', ')
}

export function buildWorklist(worklist: WorklistJson): WorklistView {
  if (worklist.status === 'terminated') {
    return { kind: 'terminated' }
  }
  const cards: WorklistCard[] = []
  const byActivity = new Map<string, WorklistCard>()
  for (const option of worklist.options) {
    const { activity, badges } = parseLabel(option.label)
    let card = byActivity.get(activity)
    if (!card) {
      card = { activity, entries: [] }
      byActivity.set(activity, card)
      cards.push(card)
    }
    card.entries.push({ option, badges, bindingText: bindingText(option.binding) })
  }
  return { kind: 'open', status: worklist.status, cards }
}

/** Every option in the view, in card order; the contract tests compare
 * this against the raw server list. */
export function flattenOptions(view: WorklistView): StepOptionJson[] {
  if (view.kind !== 'open') {
    return []
  }
  return view.cards.flatMap((card) => card.entries.map((entry) => entry.option))
}
