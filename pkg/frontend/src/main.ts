import { ApiClient } from "./api.js";
import { mountApp } from "./app.js";

const params = new URLSearchParams(window.location.search);
const apiBase = params.get("api") ?? "http://127.0.0.1:8000";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app container");

const app = mountApp(root, new ApiClient(apiBase));
void app.start();
