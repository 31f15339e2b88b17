import { mount } from "./app.js";

window.addEventListener("DOMContentLoaded", () => {
  const root = document.querySelector<HTMLElement>("#app");
  if (root) {
    mount(root, "");
  }
});
