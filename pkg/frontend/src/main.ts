import "./style.css";
import { ApiClient } from "./api";
import { createApp } from "./app";

const root = document.querySelector<HTMLElement>("#app");
if (!root) throw new Error("missing #app root element");

createApp(root, new ApiClient());
