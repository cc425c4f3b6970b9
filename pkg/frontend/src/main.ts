import { GatewayClient } from "./api.js";
import { PortalApp } from "./app.js";

const root = document.getElementById("app");
if (root) {
  new PortalApp(root, new GatewayClient(""));
}
