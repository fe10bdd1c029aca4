import { defineConfig } from "vitest/config";

export default defineConfig({
  build: {
    outDir: "dist",
    emptyOutDir: true,
  },
  server: {
    proxy: {
      "/program": "http://127.0.0.1:4791",
      "/fire": "http://127.0.0.1:4791",
      "/trace": "http://127.0.0.1:4791",
      "/callgraph": "http://127.0.0.1:4791",
      "/source": "http://127.0.0.1:4791",
      "/filters": "http://127.0.0.1:4791",
      "/export": "http://127.0.0.1:4791",
      "/live": { target: "ws://127.0.0.1:4791", ws: true },
    },
  },
  test: {
    environment: "happy-dom",
  },
});
