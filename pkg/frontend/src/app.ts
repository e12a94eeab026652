/** DOM wiring for the workbench: one mutable state cell, pure transitions,
 * and a render pass that projects the state onto the page.
 */

import { paintScene } from "./canvas";
import {
  addObject,
  applyFailure,
  applyResponse,
  beginSubmit,
  clearPointing,
  initialState,
  isTrajectory,
  moveObject,
  removeObject,
  selectObject,
  setInstruction,
  setPointing,
  setTrajectory,
  stepTrace,
  toggleNoGesture,
  traceLength,
  updateObject,
} from "./state";
import type { WorkbenchState } from "./state";
import { buildSceneView, buildStepView, DEFAULT_VIEWPORT, pxToWorld } from "./viewmodel";
import type { SceneView } from "./viewmodel";
import { STEP_KIND_ORDER } from "./types";
import type { ReasonRequest, ReasonResponse, Vocab } from "./types";

/** Everything the UI needs from a client; ApiClient satisfies it. */
export interface WorkbenchClient {
  vocab(): Promise<Vocab>;
  reason(req: ReasonRequest): Promise<ReasonResponse>;
}

export interface App {
  root: HTMLElement;
  /** Current state, for tests and debugging. */
  state(): WorkbenchState;
  /** Issue the current scene/instruction as a request; resolves when settled. */
  submit(): Promise<void>;
  /** Resolves once the startup vocabulary fetch has settled. */
  ready: Promise<void>;
}

const TEMPLATE = `
  <div class="workbench">
    <header>
      <h1>Scene Workbench</h1>
      <div class="banner" hidden></div>
    </header>
    <main>
      <section class="stage">
        <canvas width="${DEFAULT_VIEWPORT.width}" height="${DEFAULT_VIEWPORT.height}"></canvas>
        <div class="stage-bar">
          <span class="pointing-readout"></span>
          <button type="button" class="clear-pointing">clear gesture</button>
          <label class="upload">load trajectory
            <input type="file" class="trajectory-file" accept=".json,application/json" />
          </label>
        </div>
        <div class="legend"></div>
      </section>
      <section class="controls">
        <label class="instruction-label">instruction
          <textarea class="instruction" rows="2" spellcheck="false"></textarea>
        </label>
        <div class="submit-row">
          <button type="button" class="submit">resolve</button>
          <label class="no-gesture-label">
            <input type="checkbox" class="no-gesture" /> ignore gesture
          </label>
          <span class="status"></span>
        </div>
        <div class="prediction"></div>
        <fieldset class="trace">
          <legend>reasoning trace</legend>
          <div class="trace-bar">
            <button type="button" class="trace-prev">&#9664;</button>
            <span class="trace-pos"></span>
            <button type="button" class="trace-next">&#9654;</button>
          </div>
          <div class="step-title"></div>
          <div class="step-kinds"></div>
          <div class="step-blend"></div>
        </fieldset>
        <fieldset class="objects">
          <legend>objects</legend>
          <div class="object-buttons">
            <button type="button" class="add-object">add object</button>
            <button type="button" class="remove-object">remove selected</button>
          </div>
          <ul class="object-list"></ul>
          <div class="editor"></div>
        </fieldset>
      </section>
    </main>
  </div>
`;

export function createApp(root: HTMLElement, client: WorkbenchClient): App {
  root.innerHTML = TEMPLATE;
  const el = {
    banner: must<HTMLElement>(root, ".banner"),
    canvas: must<HTMLCanvasElement>(root, "canvas"),
    pointingReadout: must<HTMLElement>(root, ".pointing-readout"),
    clearPointing: must<HTMLButtonElement>(root, ".clear-pointing"),
    trajectoryFile: must<HTMLInputElement>(root, ".trajectory-file"),
    legend: must<HTMLElement>(root, ".legend"),
    instruction: must<HTMLTextAreaElement>(root, ".instruction"),
    submit: must<HTMLButtonElement>(root, ".submit"),
    noGesture: must<HTMLInputElement>(root, ".no-gesture"),
    status: must<HTMLElement>(root, ".status"),
    prediction: must<HTMLElement>(root, ".prediction"),
    tracePrev: must<HTMLButtonElement>(root, ".trace-prev"),
    tracePos: must<HTMLElement>(root, ".trace-pos"),
    traceNext: must<HTMLButtonElement>(root, ".trace-next"),
    stepTitle: must<HTMLElement>(root, ".step-title"),
    stepKinds: must<HTMLElement>(root, ".step-kinds"),
    stepBlend: must<HTMLElement>(root, ".step-blend"),
    addObject: must<HTMLButtonElement>(root, ".add-object"),
    removeObject: must<HTMLButtonElement>(root, ".remove-object"),
    objectList: must<HTMLUListElement>(root, ".object-list"),
    editor: must<HTMLElement>(root, ".editor"),
  };

  let state = initialState();
  let vocab: Vocab | null = null;
  let lastView: SceneView = buildSceneView(state);
  let drag: { id: string } | null = null;

  function update(next: WorkbenchState): void {
    if (next === state) return;
    state = next;
    render();
  }

  function render(): void {
    el.banner.hidden = state.banner === null;
    el.banner.textContent = state.banner ?? "";

    if (el.instruction.value !== state.instruction) el.instruction.value = state.instruction;
    el.noGesture.checked = state.noGesture;
    el.status.textContent = state.pending !== null ? "resolving…" : "";

    el.pointingReadout.textContent = describePointing(state);
    el.prediction.textContent =
      state.response === null ? "prediction: —" : `prediction: ${state.response.prediction}`;

    const stepView = buildStepView(state);
    el.tracePos.textContent = `${stepView.index} / ${stepView.total}`;
    el.stepTitle.textContent = stepView.title;
    el.stepKinds.replaceChildren(
      ...(stepView.step === null
        ? []
        : stepView.step.type_probs.map((p, j) => {
            const row = document.createElement("div");
            row.className = "kind-row";
            const name = document.createElement("span");
            name.className = "kind-name";
            name.textContent = STEP_KIND_ORDER[j] ?? `kind ${j}`;
            const bar = document.createElement("span");
            bar.className = "kind-bar";
            bar.style.width = `${Math.round(100 * p)}px`;
            const value = document.createElement("span");
            value.className = "kind-value";
            value.textContent = p.toFixed(2);
            row.append(name, bar, value);
            return row;
          })),
    );
    el.stepBlend.textContent =
      stepView.rPrime === null
        ? ""
        : `edge blend r' = ${stepView.rPrime} (${stepView.rPrime > 0.5 ? "relation hop" : "node filter"})`;

    renderObjectList();
    renderEditor();

    lastView = buildSceneView(state);
    el.legend.textContent = `legend: ${lastView.legend}`;
    paintScene(el.canvas, lastView, DEFAULT_VIEWPORT);
  }

  function renderObjectList(): void {
    el.objectList.replaceChildren(
      ...state.scene.objects.map((o) => {
        const li = document.createElement("li");
        li.dataset.id = o.id;
        li.className = state.selected === o.id ? "selected" : "";
        li.textContent = `${o.id}: ${o.color} ${o.size} ${o.shape} ${o.name}`;
        li.addEventListener("click", () => update(selectObject(state, o.id)));
        return li;
      }),
    );
  }

  function renderEditor(): void {
    const obj = state.scene.objects.find((o) => o.id === state.selected);
    if (!obj) {
      el.editor.replaceChildren();
      return;
    }
    const attrs: Array<{ field: "name" | "color" | "shape" | "size"; words: string[] }> = [
      { field: "name", words: vocab?.name ?? [obj.name] },
      { field: "color", words: vocab?.color ?? [obj.color] },
      { field: "shape", words: vocab?.shape ?? [obj.shape] },
      { field: "size", words: vocab?.size ?? [obj.size] },
    ];
    el.editor.replaceChildren(
      ...attrs.map(({ field, words }) => {
        const label = document.createElement("label");
        label.textContent = field;
        const select = document.createElement("select");
        select.className = `picker-${field}`;
        for (const word of words.includes(obj[field]) ? words : [obj[field], ...words]) {
          const opt = document.createElement("option");
          opt.value = word;
          opt.textContent = word;
          opt.selected = word === obj[field];
          select.append(opt);
        }
        select.addEventListener("change", () =>
          update(updateObject(state, obj.id, { [field]: select.value })),
        );
        label.append(select);
        return label;
      }),
      ...(["x", "y"] as const).map((axis, i) => {
        const label = document.createElement("label");
        label.textContent = axis;
        const input = document.createElement("input");
        input.type = "number";
        input.step = "0.1";
        input.className = `picker-${axis}`;
        input.value = String(obj.position[i]);
        input.addEventListener("change", () => {
          const v = Number(input.value);
          if (!Number.isFinite(v)) return;
          const [x, y] = [obj.position[0], obj.position[1]];
          update(moveObject(state, obj.id, axis === "x" ? v : x, axis === "y" ? v : y));
        });
        label.append(input);
        return label;
      }),
    );
  }

  function submit(): Promise<void> {
    const ticket = beginSubmit(state);
    update(ticket.state);
    return client.reason(ticket.request).then(
      (response) => update(applyResponse(state, ticket.seq, response)),
      (err: unknown) =>
        update(applyFailure(state, ticket.seq, err instanceof Error ? err.message : String(err))),
    );
  }

  // -- events ---------------------------------------------------------------

  el.instruction.addEventListener("input", () => {
    update(setInstruction(state, el.instruction.value));
  });
  el.noGesture.addEventListener("change", () => update(toggleNoGesture(state)));
  el.submit.addEventListener("click", () => {
    void submit();
  });
  el.clearPointing.addEventListener("click", () => update(clearPointing(state)));
  el.tracePrev.addEventListener("click", () => update(stepTrace(state, -1)));
  el.traceNext.addEventListener("click", () => update(stepTrace(state, +1)));
  el.addObject.addEventListener("click", () => update(addObject(state, vocab)));
  el.removeObject.addEventListener("click", () => {
    if (state.selected !== null) update(removeObject(state, state.selected));
  });

  el.trajectoryFile.addEventListener("change", () => {
    const file = el.trajectoryFile.files?.[0];
    if (!file) return;
    void file.text().then(
      (text) => {
        let parsed: unknown;
        try {
          parsed = JSON.parse(text);
        } catch {
          update({ ...state, banner: "trajectory file is not valid JSON" });
          return;
        }
        if (
          typeof parsed === "object" &&
          parsed !== null &&
          Array.isArray((parsed as { samples?: unknown }).samples)
        ) {
          update(setTrajectory(state, parsed as Parameters<typeof setTrajectory>[1]));
        } else {
          update({ ...state, banner: "trajectory file must contain rate_hz and samples" });
        }
      },
      () => update({ ...state, banner: "could not read the trajectory file" }),
    );
  });

  function eventPx(e: MouseEvent): { px: number; py: number } {
    const rect = el.canvas.getBoundingClientRect();
    const sx = rect.width > 0 ? el.canvas.width / rect.width : 1;
    const sy = rect.height > 0 ? el.canvas.height / rect.height : 1;
    return { px: (e.clientX - rect.left) * sx, py: (e.clientY - rect.top) * sy };
  }

  function hitObject(px: number, py: number): string | null {
    for (let i = lastView.objects.length - 1; i >= 0; i -= 1) {
      const o = lastView.objects[i];
      if (o && Math.hypot(o.px - px, o.py - py) <= o.radius + 8) return o.id;
    }
    return null;
  }

  el.canvas.addEventListener("mousedown", (e) => {
    const { px, py } = eventPx(e);
    const id = hitObject(px, py);
    if (id !== null) {
      drag = { id };
      update(selectObject(state, id));
    } else {
      const { x, y } = pxToWorld(DEFAULT_VIEWPORT, px, py);
      update(setPointing(state, round2(x), round2(y)));
    }
  });
  el.canvas.addEventListener("mousemove", (e) => {
    if (drag === null) return;
    const { px, py } = eventPx(e);
    const { x, y } = pxToWorld(DEFAULT_VIEWPORT, px, py);
    update(moveObject(state, drag.id, round2(x), round2(y)));
  });
  const endDrag = () => {
    drag = null;
  };
  el.canvas.addEventListener("mouseup", endDrag);
  el.canvas.addEventListener("mouseleave", endDrag);

  const ready = client.vocab().then(
    (v) => {
      vocab = v;
      render();
    },
    (err: unknown) => {
      update({
        ...state,
        banner: `vocabulary unavailable: ${err instanceof Error ? err.message : String(err)}`,
      });
    },
  );

  render();
  return { root, state: () => state, submit, ready };
}

function describePointing(state: WorkbenchState): string {
  if (state.pointing === null) return "no gesture evidence (click the ground to point)";
  if (isTrajectory(state.pointing)) {
    return `trajectory loaded (${state.pointing.samples.length} samples)`;
  }
  return `pointing at (${state.pointing.x.toFixed(2)}, ${state.pointing.y.toFixed(2)})`;
}

function must<T extends Element>(root: ParentNode, selector: string): T {
  const node = root.querySelector(selector);
  if (!node) throw new Error(`missing element: ${selector}`);
  return node as T;
}

function round2(v: number): number {
  return Math.round(v * 100) / 100;
}
