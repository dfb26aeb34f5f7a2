import { ApiClient } from "./api.js";
import { UiSession } from "./app.js";

// Injected by the build; empty string means same-origin.
declare const __API_BASE__: string;

const apiBase = typeof __API_BASE__ === "string" ? __API_BASE__ : "";
const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");

const session = new UiSession(root, new ApiClient(apiBase));
void session.start();
