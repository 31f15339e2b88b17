// Job progress strip: lists jobs for the open project and follows the
// running one through the push channel (or polling where EventSource is
// unavailable).

import type { ApiClient } from "./api.js";
import type { Job } from "./types.js";

export function renderJobsStrip(container: HTMLElement, jobs: Job[]): void {
  const doc = container.ownerDocument;
  container.innerHTML = "";
  for (const job of jobs.slice(-5)) {
    const chip = doc.createElement("span");
    chip.className = `job-chip job-${job.state}`;
    chip.dataset.job = job.id;
    const percent = Math.round(job.progress * 100);
    chip.textContent = `${job.kind}: ${job.state} ${percent}%`;
    container.appendChild(chip);
  }
}

export function followJob(
  container: HTMLElement,
  api: ApiClient,
  jobId: string,
  onDone: (job: Job) => void,
): () => void {
  const doc = container.ownerDocument;
  const line = doc.createElement("div");
  line.className = "job-progress";
  container.appendChild(line);
  return api.watchJob(
    jobId,
    (message) => {
      line.textContent = message;
    },
    (job) => {
      line.textContent = `${job.kind} ${job.state}`;
      line.className = `job-progress job-${job.state}`;
      onDone(job);
    },
  );
}
