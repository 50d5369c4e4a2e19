/**
 * HTML renderers for the three views. Pure string builders so they can be
 * unit-tested without a browser; app.ts assigns the output to innerHTML
 * and wires events by element id afterwards.
 */

import type { DashboardModel } from './dashboard'
import type { FormModel } from './forms'
import type { WorklistView } from './worklist'

export function esc(text: string): string {
  return text
    .replaceAll('&', '&amp;')
    .replaceAll('<', '&lt;')
    .replaceAll('>', '&gt;')
    .replaceAll('"', '&quot;')
}

export function renderWorklist(view: WorklistView): string {
  if (view.kind === 'terminated') {
    return '<div class="banner banner-terminated">Case terminated. Nothing left to do.</div>'
  }
  if (view.kind === 'missing') {
    return `<div class="banner banner-error">${esc(view.detail)}</div>`
  }
  if (view.cards.length === 0) {
    return '<div class="banner">No step is enabled right now.</div>'
  }
  const cards = view.cards.map((card) => {
    const entries = card.entries.map((entry) => {
      const badges = entry.badges
        .map(
          (badge) =>
            `<span class="badge badge-${badge.kind}">${badge.marker} ${badge.kind} ${badge.index}</span>`,
        )
        .join('')
      const binding = entry.bindingText
        ? `<span class="binding">${esc(entry.bindingText)}</span>`
        : ''
      return (
        `<li><button class="step" data-option-id="${esc(entry.option.optionId)}">` +
        `${badges || ''}execute</button>${binding}</li>`
      )
    })
    return (
      `<section class="card"><h3>${esc(card.activity)}</h3>` +
      `<ul>${entries.join('')}</ul></section>`
    )
  })
  return cards.join('')
}

export function renderForm(model: FormModel): string {
  if (model.forms.length === 0) {
    return ''
  }
  const blocks = model.forms.map((form, formIndex) => {
    const heading =
      form.mode === 'created'
        ? `new ${esc(form.className)}`
        : `update ${esc(form.objectId ?? form.className)}`
    const fields = form.fields.map((field, fieldIndex) => {
      const id = `field-${formIndex}-${fieldIndex}`
      const error = field.error ? `<span class="field-error">${esc(field.error)}</span>` : ''
      return (
        `<label for="${id}">${esc(field.spec.name)} (${field.spec.type})</label>` +
        `<input id="${id}" data-form="${formIndex}" data-field="${fieldIndex}"` +
        ` value="${esc(field.raw)}">${error}`
      )
    })
    return `<fieldset><legend>${heading}</legend>${fields.join('')}</fieldset>`
  })
  return blocks.join('')
}

export function renderDashboard(model: DashboardModel): string {
  const badge = model.terminable
    ? '<span class="badge badge-terminable">may close now</span>'
    : ''
  const status = `<p>status: <strong>${esc(model.status)}</strong> ${badge} (${model.stepCount} steps)</p>`
  const tables = model.groups.map((group) => {
    const rows = group.objects.map((record) => {
      const attrs = Object.entries(record.attributes)
        .map(([name, value]) => `${esc(name)}=${esc(JSON.stringify(value))}`)
        .join(', ')
      return `<tr><td>${esc(record.id)}</td><td>${esc(record.state)}</td><td>${attrs}</td></tr>`
    })
    return (
      `<table class="objects"><caption>${esc(group.className)}</caption>` +
      `<thead><tr><th>object</th><th>state</th><th>attributes</th></tr></thead>` +
      `<tbody>${rows.join('')}</tbody></table>`
    )
  })
  const edges = model.edges
    .map(([a, b]) => `<li>${esc(a)} &mdash; ${esc(b)}</li>`)
    .join('')
  return `${status}${tables.join('')}<h3>associations</h3><ul class="edges">${edges}</ul>`
}
