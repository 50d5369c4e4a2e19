/**
 * Payload shapes of the casenet HTTP API, written down once so the rest
 * of the client stays typed. The server is the source of truth; these
 * mirror its JSON exactly and add nothing.
 */

export type AttributeType = 'string' | 'integer' | 'boolean'

export interface AttributeFieldSpec {
  name: string
  type: AttributeType
}

export interface AttributeFormJson {
  class: string
  mode: 'created' | 'updated'
  objectId: string | null
  schema: AttributeFieldSpec[]
}

export interface ObjectRefJson {
  class: string
  index: number
}

export interface IdTokenJson extends ObjectRefJson {
  type: 'id'
}

export interface IdSetTokenJson {
  type: 'idSet'
  ids: ObjectRefJson[]
}

export type BindingTokenJson = IdTokenJson | IdSetTokenJson

export interface StepOptionJson {
  optionId: string
  transitionId: string
  label: string
  binding: Record<string, BindingTokenJson>
  requiredForms: AttributeFormJson[]
}

export type CaseStatus = 'initial' | 'running' | 'terminated'

export interface WorklistJson {
  status: CaseStatus
  options: StepOptionJson[]
}

export interface ObjectRecordJson {
  id: string
  class: string
  state: string
  attributes: Record<string, unknown>
}

export interface CaseSummaryJson {
  caseId: string
  modelId: string
  status: CaseStatus
  objects: ObjectRecordJson[]
  associations: string[][]
  steps: number
}

export interface ModelSummaryJson {
  id: string
  caseClass: string
  classes: string[]
  fragments: string[]
  transitions: number
  places: number
  modelHash: string
}

/** Attribute values keyed by class name (creations) or object id (updates). */
export type AttributePayload = Record<string, Record<string, string | number | boolean>>
