/**
 * Named scenario drafts in browser local storage.
 *
 * Drafts are stored as the exact JSON string that was saved, so a load
 * after save round-trips bit-exactly (string equality), and duplicating a
 * draft for what-if editing never mutates the original.
 */

import type { ScenarioDraft } from "./validation.js";

const STORAGE_KEY = "heartcast.drafts.v1";

export interface DraftStore {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
}

function readAll(store: DraftStore): Record<string, string> {
  const raw = store.getItem(STORAGE_KEY);
  if (!raw) return {};
  try {
    return JSON.parse(raw) as Record<string, string>;
  } catch {
    return {};
  }
}

function writeAll(store: DraftStore, drafts: Record<string, string>): void {
  store.setItem(STORAGE_KEY, JSON.stringify(drafts));
}

export function saveDraft(store: DraftStore, draft: ScenarioDraft): string {
  const drafts = readAll(store);
  const serialized = JSON.stringify({ name: draft.name, scenario: draft.scenario });
  drafts[draft.name] = serialized;
  writeAll(store, drafts);
  return serialized;
}

export function loadDraft(store: DraftStore, name: string): ScenarioDraft | null {
  const serialized = readAll(store)[name];
  if (serialized === undefined) return null;
  const parsed = JSON.parse(serialized) as { name: string; scenario: ScenarioDraft["scenario"] };
  return { name: parsed.name, scenario: parsed.scenario, dirty: false };
}

/** The exact string that would be restored; used for round-trip checks. */
export function storedString(store: DraftStore, name: string): string | null {
  return readAll(store)[name] ?? null;
}

export function listDrafts(store: DraftStore): string[] {
  return Object.keys(readAll(store)).sort();
}

export function deleteDraft(store: DraftStore, name: string): void {
  const drafts = readAll(store);
  delete drafts[name];
  writeAll(store, drafts);
}

/** Duplicate-and-edit: what-if scenarios are first-class. */
export function duplicateDraft(store: DraftStore, name: string, copyName: string): ScenarioDraft | null {
  const original = loadDraft(store, name);
  if (original === null) return null;
  const copy: ScenarioDraft = {
    name: copyName,
    scenario: JSON.parse(JSON.stringify(original.scenario)),
    dirty: true,
  };
  saveDraft(store, copy);
  return copy;
}
