/** Hypothesis submission form: client-side empty guard, server-side
 * validation errors shown verbatim next to the field. */

import { ApiClient, ApiRequestError, formatApiError } from "./api.js";

export interface SubmitFormElements {
  root: HTMLElement;
  textarea: HTMLTextAreaElement;
  strategy: HTMLSelectElement;
  trials: HTMLInputElement;
  button: HTMLButtonElement;
  error: HTMLElement;
}

export function buildSubmitForm(doc: Document): SubmitFormElements {
  const root = doc.createElement("form");
  root.className = "submit-form";
  root.innerHTML = `
    <label>Hypothesis
      <textarea name="hypothesis" rows="2"
        placeholder="The bulk modulus of Kr-fcc is greater than that of Ar-fcc"></textarea>
    </label>
    <label>Strategy
      <select name="strategy">
        <option value="adversarial" selected>adversarial</option>
        <option value="voting">voting</option>
      </select>
    </label>
    <label>Trials <input name="trials" type="number" min="1" value="3"></input></label>
    <button type="submit">Validate</button>
    <div class="form-error" role="alert"></div>
  `;
  return {
    root,
    textarea: root.querySelector("textarea")!,
    strategy: root.querySelector("select")!,
    trials: root.querySelector("input[name=trials]")!,
    button: root.querySelector("button")!,
    error: root.querySelector(".form-error")!,
  };
}

export function wireSubmitForm(
  form: SubmitFormElements,
  api: ApiClient,
  onCreated: (runId: string) => void,
): void {
  const submit = async () => {
    const text = form.textarea.value.trim();
    form.error.textContent = "";
    if (!text) {
      form.error.textContent = "Enter a hypothesis first.";
      return; // no request leaves the client
    }
    form.button.disabled = true;
    try {
      const runId = await api.submitRun(text, {
        discussion: { strategy: form.strategy.value },
        n_trials: Number(form.trials.value) || 3,
      });
      onCreated(runId);
    } catch (err) {
      form.error.textContent = err instanceof ApiRequestError
        ? formatApiError(err.apiError)
        : String(err);
    } finally {
      form.button.disabled = false;
    }
  };
  form.root.addEventListener("submit", (ev) => {
    ev.preventDefault();
    void submit();
  });
}
