import { defineConfig } from "vitest/config";

export default defineConfig({
  server: {
    port: 5173,
    // the explorer never computes metrics itself; everything comes from the
    // ecp service (ecp serve --workspace-dir ... --port 8000)
    proxy: {
      "/v1": "http://127.0.0.1:8000",
    },
  },
  test: {
    environment: "jsdom",
  },
});
