/**
 * Attribute forms. The server announces, per step option, which objects
 * take attribute values (requiredForms): every created object needs a
 * complete set of values, updated objects take partial ones. This module
 * turns those announcements into an editable form model and validates it
 * client-side with the same rules the server enforces, so a request that
 * leaves this module is not going to bounce with a 422.
 */

import type {
  AttributeFieldSpec,
  AttributePayload,
  AttributeFormJson,
  StepOptionJson,
} from './types'

export interface FormField {
  spec: AttributeFieldSpec
  /** raw editor content; empty string means "not filled in" */
  raw: string
  error?: string
}

export interface ObjectForm {
  /** payload key: class name for creations, object id for updates */
  key: string
  className: string
  mode: 'created' | 'updated'
  objectId: string | null
  fields: FormField[]
}

export interface FormModel {
  optionId: string
  forms: ObjectForm[]
}

export function buildFormModel(option: StepOptionJson): FormModel {
  return {
    optionId: option.optionId,
    forms: option.requiredForms.map((form: AttributeFormJson) => ({
      key: form.objectId ?? form.class,
      className: form.class,
      mode: form.mode,
      objectId: form.objectId,
      fields: form.schema.map((spec) => ({ spec, raw: '' })),
    })),
  }
}

export type ParseResult =
  | { ok: true; value: string | number | boolean }
  | { ok: false; error: string }

/** Text input -> typed value, rejecting what the server would reject. */
export function parseFieldInput(spec: AttributeFieldSpec, raw: string): ParseResult {
  const trimmed = raw.trim()
  switch (spec.type) {
    case 'string':
      return { ok: true, value: raw }
    case 'integer':
      if (!/^-?\d+$/.test(trimmed)) {
        return { ok: false, error: `${spec.name} must be of type integer` }
      }
      return { ok: true, value: Number(trimmed) }
    case 'boolean':
      if (trimmed === 'true') {
        return { ok: true, value: true }
      }
      if (trimmed === 'false') {
        return { ok: true, value: false }
      }
      return { ok: false, error: `${spec.name} must be of type boolean` }
  }
}

export interface CollectResult {
  payload: AttributePayload
  errors: string[]
}

/**
 * Validates the whole model and assembles the request payload. Creations
 * must be complete; updates send only the filled-in fields. Field errors
 * are also written back onto the fields for inline display.
 */
export function collectAttributes(model: FormModel): CollectResult {
  const payload: AttributePayload = {}
  const errors: string[] = []
  for (const form of model.forms) {
    const values: Record<string, string | number | boolean> = {}
    for (const field of form.fields) {
      field.error = undefined
      if (field.raw === '' && form.mode === 'updated') {
        continue
      }
      if (field.raw === '' && form.mode === 'created') {
        field.error = `missing value for new '${form.className}' object: ${field.spec.name}`
        errors.push(field.error)
        continue
      }
      const parsed = parseFieldInput(field.spec, field.raw)
      if (!parsed.ok) {
        field.error = `'${form.className}' ${parsed.error}`
        errors.push(field.error)
        continue
      }
      values[field.spec.name] = parsed.value
    }
    if (Object.keys(values).length > 0) {
      payload[form.key] = values
    }
  }
  return { payload, errors }
}

/**
 * Checks an already-typed payload against an option's forms: same checks
 * the server runs, minus anything that needs the marking. Returns the
 * list of problems, empty when the payload would be accepted.
 */
export function validateAttributes(
  option: StepOptionJson,
  payload: AttributePayload,
): string[] {
  const problems: string[] = []
  const allowed = new Map<string, AttributeFormJson>()
  for (const form of option.requiredForms) {
    allowed.set(form.objectId ?? form.class, form)
  }
  for (const key of Object.keys(payload)) {
    if (!allowed.has(key)) {
      problems.push(`no attribute form for '${key}' in this step`)
    }
  }
  for (const [key, form] of allowed) {
    const values = payload[key] ?? {}
    const schema = new Map(form.schema.map((spec) => [spec.name, spec]))
    for (const [name, value] of Object.entries(values)) {
      const spec = schema.get(name)
      if (!spec) {
        problems.push(`'${form.class}' has no attribute '${name}'`)
        continue
      }
      const good =
        (spec.type === 'string' && typeof value === 'string') ||
        (spec.type === 'integer' && typeof value === 'number' && Number.isInteger(value)) ||
        (spec.type === 'boolean' && typeof value === 'boolean')
      if (!good) {
        problems.push(`${key}.${name} must be of type ${spec.type}`)
      }
    }
    if (form.mode === 'created') {
      const missing = [...schema.keys()].filter((name) => !(name in values)).sort()
      if (missing.length > 0) {
        problems.push(
          `missing value(s) for new '${form.class}' object: ${missing.join(', ')}`,
        )
      }
    }
  }
  return problems
}
