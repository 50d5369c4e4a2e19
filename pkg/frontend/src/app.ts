/**
 * Browser wiring: one case per page, three panes (worklist, form,
 * dashboard), a polling loop that keeps worklist and dashboard fresh, and
 * optimistic concurrency on execution - a 409 refreshes the worklist and
 * shows a notice instead of failing.
 */

import { CaseApi } from './api'
import { buildDashboard } from './dashboard'
import { buildFormModel, collectAttributes, type FormModel } from './forms'
import { createPoller } from './poll'
import { renderDashboard, renderForm, renderWorklist, esc } from './render'
import { buildWorklist, flattenOptions } from './worklist'
import type { StepOptionJson } from './types'

const POLL_INTERVAL_MS = Number(
  new URLSearchParams(location.search).get('pollMs') ?? '2000',
)

function pane(id: string): HTMLElement {
  const element = document.getElementById(id)
  if (!element) {
    throw new Error(`missing pane #${id}`)
  }
  return element
}

export async function mount(): Promise<void> {
  const params = new URLSearchParams(location.search)
  const api = new CaseApi(params.get('api') ?? '')
  const worklistPane = pane('worklist')
  const formPane = pane('form')
  const dashboardPane = pane('dashboard')
  const noticePane = pane('notice')

  let caseId = params.get('case')
  if (!caseId) {
    const models = await api.listModels()
    const first = models[0]
    if (!first) {
      noticePane.textContent = 'no models loaded on the server'
      return
    }
    const created = await api.createCase(first.id)
    caseId = created.caseId
  }

  let options: StepOptionJson[] = []
  let formModel: FormModel | undefined
  let selected: StepOptionJson | undefined

  function notice(text: string): void {
    noticePane.innerHTML = text ? `<div class="notice">${esc(text)}</div>` : ''
  }

  function renderFormPane(): void {
    formPane.innerHTML = formModel ? renderForm(formModel) : ''
    formPane.querySelectorAll('input').forEach((input) => {
      input.addEventListener('input', () => {
        const form = formModel?.forms[Number(input.dataset.form)]
        const field = form?.fields[Number(input.dataset.field)]
        if (field) {
          field.raw = input.value
        }
      })
    })
    if (selected && formModel) {
      const button = document.createElement('button')
      button.id = 'execute'
      button.textContent = `execute: ${selected.label}`
      button.addEventListener('click', () => void execute())
      formPane.appendChild(button)
    }
  }

  async function refresh(): Promise<void> {
    const [worklist, summary, terminable] = await Promise.all([
      api.getWorklist(caseId!),
      api.getCase(caseId!),
      api.isTerminable(caseId!).catch(() => false),
    ])
    const view = buildWorklist(worklist)
    options = flattenOptions(view)
    if (selected && !options.some((o) => o.optionId === selected!.optionId)) {
      selected = undefined
      formModel = undefined
      renderFormPane()
    }
    worklistPane.innerHTML = renderWorklist(view)
    worklistPane.querySelectorAll<HTMLButtonElement>('button.step').forEach((button) => {
      button.addEventListener('click', () => {
        const option = options.find((o) => o.optionId === button.dataset.optionId)
        if (!option) {
          return
        }
        selected = option
        formModel = buildFormModel(option)
        if (formModel.forms.length === 0) {
          void execute()
        } else {
          renderFormPane()
        }
      })
    })
    dashboardPane.innerHTML = renderDashboard(buildDashboard(summary, terminable))
  }

  async function execute(): Promise<void> {
    if (!selected) {
      return
    }
    const model = formModel ?? buildFormModel(selected)
    const { payload, errors } = collectAttributes(model)
    if (errors.length > 0) {
      renderFormPane()
      notice('fix the highlighted fields first')
      return
    }
    const outcome = await api.postStep(caseId!, selected.optionId, payload)
    if (outcome.kind === 'stale') {
      notice(`that step is no longer available (${outcome.detail}); worklist refreshed`)
    } else if (outcome.kind === 'rejected') {
      notice(outcome.detail)
    } else {
      notice('')
      selected = undefined
      formModel = undefined
      renderFormPane()
    }
    await refresh()
  }

  const poller = createPoller(refresh, POLL_INTERVAL_MS, (error) =>
    notice(error instanceof Error ? error.message : String(error)),
  )
  await refresh()
  poller.start()
}

if (typeof document !== 'undefined' && document.getElementById('worklist')) {
  void mount().catch((error) => {
    console.error(error)
  })
}
