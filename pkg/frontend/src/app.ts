// DOM wiring for the facilitator console. All state shown on screen comes
// from a SessionViewModel; every mutation goes through the API and triggers
// a refetch. One in-flight mutation at a time: controls are disabled while a
// submission is pending.

import { ApiClient, PaletteJson, QuestionnaireJson, SessionMode, YarnColorJson } from "./api.js";
import {
  ActionResult,
  PreviewPoller,
  SessionViewModel,
  answeredCount,
  isComplete,
  loadSessionView,
  submitAnswerAction,
  submitFreeformAction,
} from "./view.js";

const api = new ApiClient("");

const SAMPLE_QUESTIONNAIRE: QuestionnaireJson = {
  id: "checkin",
  title: "Group check-in",
  questions: [
    { id: "q1", prompt: "How connected do you feel today?", options: ["Low", "Medium", "High"] },
    { id: "q2", prompt: "How rested do you feel?", options: ["Low", "Medium", "High"] },
    { id: "q3", prompt: "How hopeful are you about this week?", options: ["Low", "Medium", "High"] },
  ],
};

const SAMPLE_PALETTE: PaletteJson = {
  option_colors: [
    { name: "Crimson", rgb: [220, 50, 47] },
    { name: "Gold", rgb: [240, 200, 60] },
    { name: "Azure", rgb: [38, 100, 200] },
  ],
  boundary: { name: "Stone", rgb: [128, 128, 128] },
  warp: { name: "Natural", rgb: [242, 238, 230] },
};

let view: SessionViewModel | null = null;
let poller: PreviewPoller | null = null;
let selectedParticipant: string | null = null;
let busy = false;
let inlineError: { key: string; message: string } | null = null;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function banner(message: string | null): void {
  const box = el<HTMLDivElement>("banner");
  box.textContent = message ?? "";
  box.hidden = message === null;
}

function swatch(color: YarnColorJson): HTMLSpanElement {
  const chip = document.createElement("span");
  chip.className = "swatch";
  chip.style.backgroundColor = `rgb(${color.rgb[0]}, ${color.rgb[1]}, ${color.rgb[2]})`;
  chip.title = color.name;
  return chip;
}

async function withBusy(action: () => Promise<void>): Promise<void> {
  if (busy) {
    return;
  }
  busy = true;
  render();
  try {
    await action();
  } catch (error) {
    banner(error instanceof Error ? error.message : String(error));
  } finally {
    busy = false;
    render();
  }
}

function applyResult(result: ActionResult, errorKey: string): void {
  if (result.ok) {
    inlineError = null;
    view = result.view;
    banner(null);
  } else {
    inlineError = { key: errorKey, message: `${result.error.code}: ${result.error.detail}` };
  }
}

async function refresh(): Promise<void> {
  if (view) {
    view = await loadSessionView(api, view.session.session_id);
  }
  render();
}

function startPolling(sessionId: string): void {
  poller?.stop();
  poller = new PreviewPoller(api, sessionId, {
    onUpdate: (svg) => {
      el<HTMLDivElement>("preview").innerHTML = svg;
      void refreshQuietly();
    },
    onBanner: (message) => banner(message),
    onStop: () => banner(null),
  });
  poller.start();
}

async function refreshQuietly(): Promise<void> {
  try {
    await refresh();
  } catch {
    // polling keeps retrying; the poller raises the banner on repeat failures
  }
}

function renderParticipants(): void {
  if (!view) return;
  const questionCount = view.session.questionnaire.questions.length;
  const list = el<HTMLUListElement>("participants");
  list.innerHTML = "";
  for (const p of view.session.participants) {
    const item = document.createElement("li");
    const pick = document.createElement("button");
    pick.textContent = `${p.label} (${answeredCount(p)}/${questionCount})`;
    pick.disabled = busy;
    pick.className = p.participant_id === selectedParticipant ? "selected" : "";
    if (isComplete(p, questionCount)) {
      pick.classList.add("complete");
    }
    pick.onclick = () => {
      selectedParticipant = p.participant_id;
      render();
    };
    item.appendChild(pick);
    list.appendChild(item);
  }
}

function renderAnswerControls(): void {
  if (!view) return;
  const host = el<HTMLDivElement>("entry");
  host.innerHTML = "";
  if (view.session.mode === "freeform") {
    renderFreeformControls(host);
    return;
  }
  const participant = view.session.participants.find((p) => p.participant_id === selectedParticipant);
  if (!participant) {
    host.textContent = "Select or add a participant to start entering answers.";
    return;
  }
  view.session.questionnaire.questions.forEach((question, qi) => {
    const row = document.createElement("div");
    row.className = "question";
    const prompt = document.createElement("p");
    prompt.textContent = `${question.id}. ${question.prompt}`;
    row.appendChild(prompt);
    const given = participant.answers[String(qi)];
    question.options.forEach((label, oi) => {
      const color = view!.session.palette.option_colors[oi];
      const button = document.createElement("button");
      button.appendChild(swatch(color));
      button.appendChild(document.createTextNode(` ${label} (${color.name})`));
      button.disabled = busy || view!.session.closed || given !== undefined;
      if (given === oi) {
        button.classList.add("chosen");
      }
      button.onclick = () =>
        withBusy(async () => {
          const result = await submitAnswerAction(
            api, view!.session.session_id, participant.participant_id, qi, oi);
          applyResult(result, `answer-${participant.participant_id}-${qi}`);
        });
      row.appendChild(button);
    });
    if (inlineError && inlineError.key === `answer-${participant.participant_id}-${qi}`) {
      const note = document.createElement("span");
      note.className = "inline-error";
      note.textContent = inlineError.message;
      row.appendChild(note);
    }
    host.appendChild(row);
  });
}

function renderFreeformControls(host: HTMLDivElement): void {
  if (!view) return;
  const participant = view.session.participants.find((p) => p.participant_id === selectedParticipant);
  const intro = document.createElement("p");
  intro.textContent = participant
    ? `Log the yarns ${participant.label} picks:`
    : "Select or add a participant to log yarn picks.";
  host.appendChild(intro);
  if (!participant) {
    return;
  }
  const colors = [...view.session.palette.option_colors, view.session.palette.boundary];
  for (const color of colors) {
    const button = document.createElement("button");
    button.appendChild(swatch(color));
    button.appendChild(document.createTextNode(` ${color.name}`));
    button.disabled = busy || view.session.closed;
    button.onclick = () =>
      withBusy(async () => {
        const result = await submitFreeformAction(
          api, view!.session.session_id, participant.participant_id, color.name);
        applyResult(result, "freeform");
      });
    host.appendChild(button);
  }
  const log = document.createElement("ol");
  for (const pick of view.session.freeform_picks) {
    const item = document.createElement("li");
    item.textContent = `${pick.participant_id}: ${pick.color_name}`;
    log.appendChild(item);
  }
  host.appendChild(log);
  if (inlineError && inlineError.key === "freeform") {
    const note = document.createElement("span");
    note.className = "inline-error";
    note.textContent = inlineError.message;
    host.appendChild(note);
  }
}

function renderNextPicks(): void {
  if (!view) return;
  const list = el<HTMLUListElement>("next-picks");
  list.innerHTML = "";
  if (!view.nextPicks.length) {
    const item = document.createElement("li");
    item.textContent = "nothing pending";
    list.appendChild(item);
    return;
  }
  for (const pick of view.nextPicks) {
    const item = document.createElement("li");
    item.appendChild(swatch({ name: pick.yarn, rgb: pick.rgb }));
    const text = pick.purpose === "boundary"
      ? ` ${pick.yarn} ×${pick.count} — boundary`
      : ` ${pick.yarn} ×${pick.count} — ${pick.prompt ?? ""}`;
    item.appendChild(document.createTextNode(text));
    list.appendChild(item);
  }
}

function renderReport(): void {
  if (!view) return;
  const host = el<HTMLDivElement>("report");
  host.innerHTML = "";
  if (!view.report) {
    host.textContent = "No report for freeform sessions.";
    return;
  }
  const total = document.createElement("p");
  total.textContent = `Participants: ${view.report.participants_total}`;
  host.appendChild(total);
  for (const entry of view.report.questions) {
    const table = document.createElement("table");
    const caption = table.createCaption();
    caption.textContent = `${entry.question_id}: ${entry.prompt} (answered ${entry.answered})`;
    const question = view.session.questionnaire.questions.find((q) => q.id === entry.question_id);
    entry.counts.forEach((count, oi) => {
      const row = table.insertRow();
      row.insertCell().textContent = question?.options[oi] ?? `option ${oi}`;
      row.insertCell().textContent = String(count);
    });
    host.appendChild(table);
  }
}

function render(): void {
  const setup = el<HTMLDivElement>("setup");
  const live = el<HTMLDivElement>("live");
  if (!view) {
    setup.hidden = false;
    live.hidden = true;
    return;
  }
  setup.hidden = true;
  live.hidden = false;
  el<HTMLHeadingElement>("session-title").textContent =
    `${view.session.questionnaire.title} — ${view.session.session_id}` +
    (view.session.closed ? " (closed)" : "");
  el<HTMLDivElement>("preview").innerHTML = view.previewSvg;
  el<HTMLSpanElement>("preview-rows").textContent = `${view.previewRows} rows`;
  el<HTMLButtonElement>("close-session").disabled = busy || view.session.closed;
  el<HTMLButtonElement>("add-participant").disabled = busy || view.session.closed;
  renderParticipants();
  renderAnswerControls();
  renderNextPicks();
  renderReport();
}

function wireSetup(): void {
  el<HTMLTextAreaElement>("questionnaire-json").value = JSON.stringify(SAMPLE_QUESTIONNAIRE, null, 2);
  el<HTMLTextAreaElement>("palette-json").value = JSON.stringify(SAMPLE_PALETTE, null, 2);

  el<HTMLButtonElement>("create-session").onclick = () =>
    withBusy(async () => {
      const questionnaire = JSON.parse(el<HTMLTextAreaElement>("questionnaire-json").value);
      const palette = JSON.parse(el<HTMLTextAreaElement>("palette-json").value);
      const mode = el<HTMLSelectElement>("mode").value as SessionMode;
      const sessionId = await api.createSession(questionnaire, palette, mode, {});
      view = await loadSessionView(api, sessionId);
      selectedParticipant = null;
      startPolling(sessionId);
      banner(null);
    });

  el<HTMLButtonElement>("open-session").onclick = () =>
    withBusy(async () => {
      const sessionId = el<HTMLInputElement>("session-id").value.trim();
      view = await loadSessionView(api, sessionId);
      selectedParticipant = view.session.current_participant_id;
      startPolling(sessionId);
      banner(null);
    });

  el<HTMLButtonElement>("add-participant").onclick = () =>
    withBusy(async () => {
      if (!view) return;
      const input = el<HTMLInputElement>("participant-label");
      const label = input.value.trim();
      if (!label) return;
      const pid = await api.addParticipant(view.session.session_id, label);
      input.value = "";
      selectedParticipant = pid;
      view = await loadSessionView(api, view.session.session_id);
    });

  el<HTMLButtonElement>("close-session").onclick = () =>
    withBusy(async () => {
      if (!view) return;
      await api.closeSession(view.session.session_id);
      view = await loadSessionView(api, view.session.session_id);
      poller?.stop();
    });

  el<HTMLAnchorElement>("download-wif").onclick = (event) => {
    event.preventDefault();
    if (!view) return;
    void api.getDraftWif(view.session.session_id).then((text) => {
      const blob = new Blob([text], { type: "text/plain" });
      const link = document.createElement("a");
      link.href = URL.createObjectURL(blob);
      link.download = `${view!.session.session_id}.wif`;
      link.click();
      URL.revokeObjectURL(link.href);
    });
  };
}

document.addEventListener("DOMContentLoaded", () => {
  wireSetup();
  render();
});
