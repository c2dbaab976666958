/**
 * Scenario explorer: form editing, forecast runs, and what-if comparison.
 *
 * All numbers shown come from the service; the client only derives chart
 * geometry and the verification sums exposed in the footer.
 */

import { ApiClient, ApiError, NetworkError } from "./api.js";
import { renderRibbonLines, renderStackedArea } from "./charts.js";
import { buildComparison, overlayCurves } from "./compare.js";
import {
  deleteDraft,
  duplicateDraft,
  listDrafts,
  loadDraft,
  saveDraft,
} from "./storage.js";
import type { GroupPayload, ReportPayload, ScenarioPayload } from "./types.js";
import { MIN_TRAIT_DIM, validateScenarioForm, type ScenarioDraft } from "./validation.js";
import { buildForecastView, type ForecastView } from "./views.js";

interface LoadedForecast {
  label: string;
  scenario: ScenarioPayload;
  view: ForecastView;
}

const state = {
  draft: defaultDraft(),
  loaded: [] as LoadedForecast[],
  client: new ApiClient(inferBaseUrl()),
};

function inferBaseUrl(): string {
  if (typeof window !== "undefined" && window.location.protocol.startsWith("http")) {
    return window.location.origin;
  }
  return "http://127.0.0.1:8787";
}

function defaultDraft(): ScenarioDraft {
  return {
    name: "my-scenario",
    dirty: false,
    scenario: {
      schema_version: 1,
      seed: 42,
      horizon_years: 10,
      grid_step_months: 1,
      mc: { suitors: 1500, realizations: 800 },
      user: {
        traits: [0.5, 0.5, 0.5, 0.5, 0.5],
        window: {
          centers: [0.5, 0.5, 0.5, 0.5, 0.5],
          halfwidths: [0.2, 0.2, 0.2, 0.2, 0.2],
          importances: [1, 1, 1, 1, 1],
          drift_rate: 0.0,
        },
        extroversion: 0.5,
        goals: [{ weight: 0.5, sustainability: 0.5 }],
        tau_single: 4.0,
        sensitivity: 1.0,
        open_to_dating: true,
      },
      relationship: null,
      groups: [
        {
          id: "friends",
          base_encounter_rate: 3.0,
          established: true,
          population: {
            type: "parametric",
            n: 2000,
            mean: [0.5, 0.5, 0.5, 0.5, 0.5],
            cov: identity(5, 0.03),
            own_window_halfwidths: { dist: "uniform", low: 0.1, high: 0.25 },
          },
        },
      ],
    },
  };
}

function identity(dim: number, scale: number): number[][] {
  return Array.from({ length: dim }, (_, i) =>
    Array.from({ length: dim }, (_, j) => (i === j ? scale : 0))
  );
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function numberInput(
  field: string,
  value: number,
  onChange: (v: number) => void,
  attrs: Partial<{ min: number; max: number; step: number }> = {}
): HTMLInputElement {
  const input = document.createElement("input");
  input.type = "number";
  input.value = String(value);
  input.dataset.field = field;
  if (attrs.min !== undefined) input.min = String(attrs.min);
  if (attrs.max !== undefined) input.max = String(attrs.max);
  input.step = String(attrs.step ?? 0.01);
  input.addEventListener("input", () => {
    const parsed = Number(input.value);
    if (Number.isFinite(parsed)) onChange(parsed);
    state.draft.dirty = true;
    refreshValidity();
  });
  return input;
}

function labeled(text: string, node: HTMLElement): HTMLElement {
  const wrap = document.createElement("label");
  wrap.className = "field";
  const span = document.createElement("span");
  span.textContent = text;
  wrap.append(span, node);
  return wrap;
}

function vectorRow(
  container: HTMLElement,
  title: string,
  field: string,
  values: number[],
  attrs: Partial<{ min: number; max: number; step: number }> = { min: 0, max: 1 }
): void {
  const row = document.createElement("div");
  row.className = "vector-row";
  const caption = document.createElement("span");
  caption.textContent = title;
  row.append(caption);
  values.forEach((v, i) => {
    row.append(
      numberInput(`${field}[${i}]`, v, (nv) => {
        values[i] = nv;
      }, attrs)
    );
  });
  container.append(row);
}

function renderUserForm(): void {
  const container = el<HTMLDivElement>("user-form");
  container.innerHTML = "";
  const scenario = state.draft.scenario;
  const user = scenario.user;

  const dims = document.createElement("div");
  dims.className = "vector-row";
  const dimLabel = document.createElement("span");
  dimLabel.textContent = `trait dimensions (min ${MIN_TRAIT_DIM})`;
  const dimInput = numberInput("user.traits.length", user.traits.length, (v) => {
    resizeTraits(Math.max(1, Math.round(v)));
    renderUserForm();
    renderGroupsForm();
  }, { min: 1, max: 12, step: 1 });
  dims.append(dimLabel, dimInput);
  container.append(dims);

  vectorRow(container, "your traits", "user.traits", user.traits);
  vectorRow(container, "ideal partner (centers)", "user.window.centers", user.window.centers);
  vectorRow(container, "window halfwidths", "user.window.halfwidths", user.window.halfwidths, {
    min: 0,
    max: 1,
  });
  vectorRow(
    container,
    "importances",
    "user.window.importances",
    user.window.importances ?? (user.window.importances = user.traits.map(() => 1))
  , { min: 0, max: 10 });

  container.append(
    labeled(
      "window drift per year",
      numberInput("user.window.drift_rate", user.window.drift_rate ?? 0, (v) => {
        user.window.drift_rate = v;
      }, { min: -1, max: 1 })
    ),
    labeled(
      "extroversion",
      numberInput("user.extroversion", user.extroversion, (v) => {
        user.extroversion = v;
      }, { min: 0, max: 1 })
    ),
    labeled(
      "single-life decay tau (years)",
      numberInput("user.tau_single", user.tau_single, (v) => {
        user.tau_single = v;
      }, { min: 0.1, max: 50, step: 0.1 })
    ),
    labeled(
      "horizon (years)",
      numberInput("horizon_years", scenario.horizon_years, (v) => {
        scenario.horizon_years = v;
      }, { min: 1, max: 30, step: 1 })
    ),
    labeled(
      "seed",
      numberInput("seed", scenario.seed, (v) => {
        scenario.seed = Math.round(v);
      }, { min: 0, step: 1 })
    )
  );

  const goals = document.createElement("div");
  goals.className = "goals";
  goals.append(document.createTextNode("life goals (weight, sustainability):"));
  user.goals.forEach((goal, i) => {
    goals.append(
      numberInput(`user.goals[${i}].weight`, goal.weight, (v) => {
        goal.weight = v;
      }, { min: 0, max: 10 }),
      numberInput(`user.goals[${i}].sustainability`, goal.sustainability, (v) => {
        goal.sustainability = v;
      }, { min: 0, max: 1 })
    );
  });
  const addGoal = document.createElement("button");
  addGoal.textContent = "+ goal";
  addGoal.type = "button";
  addGoal.addEventListener("click", () => {
    user.goals.push({ weight: 0.5, sustainability: 0.5 });
    renderUserForm();
    refreshValidity();
  });
  goals.append(addGoal);
  container.append(goals);
}

function resizeTraits(dim: number): void {
  const scenario = state.draft.scenario;
  const fit = (values: number[] | undefined, fill: number): number[] => {
    const current = values ?? [];
    return Array.from({ length: dim }, (_, i) => current[i] ?? fill);
  };
  const user = scenario.user;
  user.traits = fit(user.traits, 0.5);
  user.window.centers = fit(user.window.centers, 0.5);
  user.window.halfwidths = fit(user.window.halfwidths, 0.2);
  user.window.importances = fit(user.window.importances, 1);
  if (scenario.relationship) {
    scenario.relationship.partner_traits = fit(scenario.relationship.partner_traits, 0.5);
    scenario.relationship.partner_window.centers = fit(
      scenario.relationship.partner_window.centers,
      0.5
    );
    scenario.relationship.partner_window.halfwidths = fit(
      scenario.relationship.partner_window.halfwidths,
      0.25
    );
  }
  for (const group of scenario.groups) {
    if (group.population.type === "parametric") {
      group.population.mean = fit(group.population.mean, 0.5);
      group.population.cov = identity(dim, 0.03);
    }
    if (group.mean_drift) group.mean_drift = fit(group.mean_drift, 0);
  }
}

function renderPartnerForm(): void {
  const container = el<HTMLDivElement>("partner-form");
  container.innerHTML = "";
  const scenario = state.draft.scenario;
  const toggle = document.createElement("input");
  toggle.type = "checkbox";
  toggle.checked = scenario.relationship != null;
  toggle.addEventListener("change", () => {
    const dim = scenario.user.traits.length;
    scenario.relationship = toggle.checked
      ? {
          partner_traits: Array(dim).fill(0.5),
          partner_window: {
            centers: Array(dim).fill(0.5),
            halfwidths: Array(dim).fill(0.25),
          },
          status: "current",
        }
      : null;
    renderPartnerForm();
    refreshValidity();
  });
  container.append(labeled("I have a partner", toggle));
  const rel = scenario.relationship;
  if (!rel) return;

  vectorRow(container, "partner traits", "relationship.partner_traits", rel.partner_traits);
  vectorRow(
    container,
    "partner ideal (centers)",
    "relationship.partner_window.centers",
    rel.partner_window.centers
  );
  vectorRow(
    container,
    "partner window halfwidths",
    "relationship.partner_window.halfwidths",
    rel.partner_window.halfwidths
  );
  const status = document.createElement("select");
  for (const value of ["current", "past"]) {
    const opt = document.createElement("option");
    opt.value = value;
    opt.textContent = value === "current" ? "current relationship" : "past (what if repeated?)";
    status.append(opt);
  }
  status.value = rel.status ?? "current";
  status.addEventListener("change", () => {
    rel.status = status.value as "current" | "past";
    refreshValidity();
  });
  container.append(labeled("status", status));
}

function renderGroupsForm(): void {
  const container = el<HTMLDivElement>("groups-form");
  container.innerHTML = "";
  const scenario = state.draft.scenario;
  scenario.groups.forEach((group, gi) => {
    const card = document.createElement("fieldset");
    card.className = "group-card";
    const legend = document.createElement("legend");
    legend.textContent = group.id || `group ${gi + 1}`;
    card.append(legend);

    const idInput = document.createElement("input");
    idInput.type = "text";
    idInput.value = group.id;
    idInput.dataset.field = `groups[${gi}].id`;
    idInput.addEventListener("input", () => {
      group.id = idInput.value;
      legend.textContent = group.id || `group ${gi + 1}`;
      refreshValidity();
    });
    card.append(labeled("id", idInput));

    card.append(
      labeled(
        "encounters per month",
        numberInput(`groups[${gi}].base_encounter_rate`, group.base_encounter_rate, (v) => {
          group.base_encounter_rate = v;
        }, { min: 0, max: 200, step: 0.5 })
      )
    );

    const established = document.createElement("input");
    established.type = "checkbox";
    established.checked = group.established ?? true;
    established.addEventListener("change", () => {
      group.established = established.checked;
      refreshValidity();
    });
    card.append(labeled("established group", established));

    if (group.population.type === "parametric") {
      card.append(
        labeled(
          "population size",
          numberInput(`groups[${gi}].population.n`, group.population.n ?? 1000, (v) => {
            group.population.n = Math.max(1, Math.round(v));
          }, { min: 1, max: 100000, step: 100 })
        )
      );
      vectorRow(
        card,
        "population mean traits",
        `groups[${gi}].population.mean`,
        group.population.mean ?? []
      );
    }

    const remove = document.createElement("button");
    remove.type = "button";
    remove.textContent = "remove group";
    remove.addEventListener("click", () => {
      scenario.groups.splice(gi, 1);
      renderGroupsForm();
      refreshValidity();
    });
    card.append(remove);
    container.append(card);
  });

  const add = document.createElement("button");
  add.type = "button";
  add.textContent = "+ group";
  add.addEventListener("click", () => {
    const dim = scenario.user.traits.length;
    const group: GroupPayload = {
      id: `group_${scenario.groups.length + 1}`,
      base_encounter_rate: 2.0,
      established: true,
      population: {
        type: "parametric",
        n: 2000,
        mean: Array(dim).fill(0.5),
        cov: identity(dim, 0.03),
        own_window_halfwidths: { dist: "uniform", low: 0.1, high: 0.25 },
      },
    };
    scenario.groups.push(group);
    renderGroupsForm();
    refreshValidity();
  });
  container.append(add);
}

function refreshValidity(): void {
  const result = validateScenarioForm(state.draft);
  const list = el<HTMLUListElement>("validation-errors");
  list.innerHTML = "";
  for (const error of result.errors) {
    const item = document.createElement("li");
    item.textContent = `${error.field}: ${error.message}`;
    item.addEventListener("click", () => focusField(error.field));
    list.append(item);
  }
  el<HTMLButtonElement>("run-button").disabled = !result.valid;
}

function focusField(path: string): void {
  const exact = document.querySelector<HTMLElement>(`[data-field="${path}"]`);
  const prefix = exact ?? document.querySelector<HTMLElement>(`[data-field^="${path}"]`);
  prefix?.focus();
}

function showBanner(kind: "error" | "warning" | "info", message: string, retry?: () => void): void {
  const banner = el<HTMLDivElement>("banner");
  banner.className = `banner ${kind}`;
  banner.textContent = message;
  if (retry) {
    const button = document.createElement("button");
    button.type = "button";
    button.textContent = "retry";
    button.addEventListener("click", () => {
      banner.className = "banner hidden";
      retry();
    });
    banner.append(" ", button);
  }
  banner.classList.remove("hidden");
}

function clearBanner(): void {
  el<HTMLDivElement>("banner").className = "banner hidden";
}

async function runForecast(): Promise<void> {
  clearBanner();
  const validity = validateScenarioForm(state.draft);
  if (!validity.valid) {
    showBanner("error", `fix ${validity.errors.length} form error(s) first`);
    return;
  }
  const scenario = JSON.parse(JSON.stringify(state.draft.scenario)) as ScenarioPayload;
  const label = `${state.draft.name} (seed ${scenario.seed})`;
  el<HTMLButtonElement>("run-button").disabled = true;
  try {
    const result = await state.client.forecast(scenario);
    if (result.stale) return; // a newer request superseded this one
    const view = buildForecastView(result.data);
    state.loaded.push({ label, scenario, view });
    renderForecast(view);
    renderLoadedList();
  } catch (error) {
    if (error instanceof ApiError) {
      if (error.payload.code === "insufficient_data") {
        const log = (error.payload.relaxation_log ?? [])
          .map((s) => `#${s.step} ${s.action} -> ${s.count}`)
          .join("; ");
        showBanner("error", `insufficient data: ${error.payload.message}. Relaxations: ${log}`);
      } else {
        showBanner("error", `${error.payload.code}: ${error.payload.message}`);
        if (error.payload.field_path) focusField(error.payload.field_path);
      }
    } else if (error instanceof NetworkError) {
      showBanner("error", error.message, () => void runForecast());
    } else {
      showBanner("error", String(error));
    }
  } finally {
    refreshValidity();
  }
}

function renderForecast(view: ForecastView): void {
  el<HTMLDivElement>("chart-quality").innerHTML = renderStackedArea(
    view.gridMonths,
    view.byQuality,
    "P(match) by quality"
  );
  el<HTMLDivElement>("chart-group").innerHTML = renderStackedArea(
    view.gridMonths,
    view.byGroup,
    "P(match) by group"
  );
  el<HTMLDivElement>("chart-options").innerHTML = renderRibbonLines(
    view.gridMonths,
    view.options,
    "option utility (arbitrary units)"
  );

  const badge = el<HTMLDivElement>("badge");
  badge.textContent = `${view.badge.option} (margin ${view.badge.margin.toFixed(4)}) — ${view.badge.note}`;
  badge.className = `badge ${view.badge.option}`;

  const scores = view.report.scores;
  el<HTMLDivElement>("scores").innerHTML = [
    `selectivity ${scores.selectivity.toFixed(3)}`,
    `social growth ${scores.social_growth.toFixed(3)}`,
    `opportunity 1y/5y/10y ${scores.opportunity_1y.toFixed(3)} / ${scores.opportunity_5y.toFixed(3)} / ${scores.opportunity_10y.toFixed(3)}`,
    scores.partner_quality_percentile !== null
      ? `partner quality percentile ${scores.partner_quality_percentile.toFixed(3)}`
      : null,
  ]
    .filter((s) => s !== null)
    .map((s) => `<span class="score">${s}</span>`)
    .join("");

  const checks = el<HTMLDivElement>("stack-checks");
  const q = view.qualityStackCheck;
  const g = view.groupStackCheck;
  checks.textContent =
    `stacked-sum checks: quality ${q.passed ? "ok" : "FAILED"} (max err ${q.maxError.toExponential(2)}), ` +
    `group ${g.passed ? "ok" : "FAILED"} (max err ${g.maxError.toExponential(2)})`;
}

function renderLoadedList(): void {
  const list = el<HTMLUListElement>("loaded-list");
  list.innerHTML = "";
  state.loaded.forEach((item, i) => {
    const row = document.createElement("li");
    const check = document.createElement("input");
    check.type = "checkbox";
    check.dataset.loadedIndex = String(i);
    const best = item.view.options.reduce((a, b) => (b.value > a.value ? b : a));
    row.append(
      check,
      document.createTextNode(
        ` ${item.label}: ${item.view.badge.option}, best V=${best.value.toFixed(4)} `
      )
    );
    const show = document.createElement("button");
    show.type = "button";
    show.textContent = "show";
    show.addEventListener("click", () => renderForecast(item.view));
    row.append(show);
    list.append(row);
  });
  const hint = el<HTMLDivElement>("compare-hint");
  hint.textContent =
    state.loaded.length < 2 ? "load at least two forecasts to compare what-ifs" : "";
}

async function runComparison(): Promise<void> {
  clearBanner();
  const checked = Array.from(
    document.querySelectorAll<HTMLInputElement>("#loaded-list input[type=checkbox]:checked")
  ).map((c) => Number(c.dataset.loadedIndex));
  if (checked.length < 2) {
    showBanner("info", "select at least 2 loaded forecasts to compare");
    return;
  }
  if (checked.length > 4) {
    showBanner("info", "select at most 4 forecasts");
    return;
  }
  const selection = checked.map((i) => state.loaded[i]);
  try {
    const result = await state.client.compare(selection.map((s) => s.scenario));
    if (result.stale) return;
    const model = buildComparison(
      selection.map((s) => s.view),
      selection.map((s) => s.label),
      result.data.ranking
    );
    if (model.horizonMismatch) {
      showBanner("warning", "horizons differ; comparing on the common prefix");
    }
    const table = el<HTMLTableElement>("compare-table");
    const kinds = ["stay_in_relationship", "single_closed", "single_open"] as const;
    table.innerHTML =
      "<tr><th>option</th>" +
      model.columns
        .map(
          (c) =>
            `<th class="${c.index === model.highlighted ? "best" : ""}">${c.label}${
              c.index === model.highlighted ? " ★" : ""
            }</th>`
        )
        .join("") +
      "</tr>" +
      kinds
        .map((kind) => {
          const cells = model.columns
            .map((c) => {
              const v = c.optionValues[kind];
              const mark = c.bestOption === kind ? " class=\"badge-cell\"" : "";
              return `<td${mark}>${v === undefined ? "—" : v.toFixed(4)}</td>`;
            })
            .join("");
          return `<tr><td>${kind}</td>${cells}</tr>`;
        })
        .join("");
    const overlays = overlayCurves(selection.map((s) => s.view), model);
    el<HTMLDivElement>("chart-compare").innerHTML = renderRibbonLines(
      overlays[0].grid,
      overlays.map((o, i) => ({
        kind: o.kind,
        value: model.columns[i].bestValue,
        mean: o.mean,
        p10: null,
        p90: null,
      })),
      "best option per scenario"
    );
  } catch (error) {
    if (error instanceof ApiError) {
      showBanner("error", `${error.payload.code}: ${error.payload.message}`);
    } else if (error instanceof NetworkError) {
      showBanner("error", error.message, () => void runComparison());
    } else {
      showBanner("error", String(error));
    }
  }
}

function renderDraftControls(): void {
  const select = el<HTMLSelectElement>("draft-select");
  select.innerHTML = "";
  for (const name of listDrafts(localStorage)) {
    const option = document.createElement("option");
    option.value = name;
    option.textContent = name;
    select.append(option);
  }
}

function wireControls(): void {
  el<HTMLButtonElement>("run-button").addEventListener("click", () => void runForecast());
  el<HTMLButtonElement>("compare-button").addEventListener("click", () => void runComparison());

  const nameInput = el<HTMLInputElement>("draft-name");
  nameInput.value = state.draft.name;
  nameInput.addEventListener("input", () => {
    state.draft.name = nameInput.value || "unnamed";
  });

  el<HTMLButtonElement>("save-draft").addEventListener("click", () => {
    saveDraft(localStorage, state.draft);
    renderDraftControls();
    showBanner("info", `saved draft '${state.draft.name}'`);
  });
  el<HTMLButtonElement>("load-draft").addEventListener("click", () => {
    const name = el<HTMLSelectElement>("draft-select").value;
    const loaded = loadDraft(localStorage, name);
    if (loaded) {
      state.draft = loaded;
      nameInput.value = loaded.name;
      renderAllForms();
    }
  });
  el<HTMLButtonElement>("duplicate-draft").addEventListener("click", () => {
    const name = el<HTMLSelectElement>("draft-select").value;
    const copy = duplicateDraft(localStorage, name, `${name}-whatif`);
    if (copy) {
      state.draft = copy;
      nameInput.value = copy.name;
      renderAllForms();
      renderDraftControls();
      showBanner("info", `duplicated '${name}' — edit and run to compare futures`);
    }
  });
  el<HTMLButtonElement>("delete-draft").addEventListener("click", () => {
    deleteDraft(localStorage, el<HTMLSelectElement>("draft-select").value);
    renderDraftControls();
  });

  const baseUrl = el<HTMLInputElement>("base-url");
  baseUrl.value = state.client.baseUrl;
  baseUrl.addEventListener("change", () => {
    state.client = new ApiClient(baseUrl.value);
  });
}

function renderAllForms(): void {
  renderUserForm();
  renderPartnerForm();
  renderGroupsForm();
  refreshValidity();
}

export function main(): void {
  wireControls();
  renderDraftControls();
  renderAllForms();
  renderLoadedList();
}

if (typeof document !== "undefined" && document.getElementById("run-button")) {
  main();
}
