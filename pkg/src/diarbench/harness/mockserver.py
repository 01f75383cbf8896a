"""Local mock of a job-based diarization API, for tests and dry runs.

    POST /jobs            audio bytes        -> 202 {"job_id": ...}
    GET  /jobs/<id>                          -> {"status": "pending"} ... then
                                                {"status": "done", "result": <RTTM text>}
    GET  /jobs/<id>/result                   -> RTTM text (when results are not inline)

Results are looked up by the ``X-Filename`` request header.
"""

from __future__ import annotations

import argparse
import itertools
import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path


class MockDiarizationServer:
    def __init__(
        self,
        results: dict[str, str] | None = None,
        upload_delay: float = 0.1,
        pending_polls: int = 2,
        download_delay: float = 0.05,
        inline_result: bool = True,
        fail: set[str] | None = None,
        host: str = "127.0.0.1",
        port: int = 0,
    ):
        self.results = results if results is not None else {}
        self.upload_delay = upload_delay
        self.pending_polls = pending_polls
        self.download_delay = download_delay
        self.inline_result = inline_result
        self.fail = set(fail or ())
        self.jobs: dict[str, dict] = {}
        self._ids = itertools.count()
        self._lock = threading.Lock()
        self._httpd = ThreadingHTTPServer((host, port), self._handler())
        self._httpd.daemon_threads = True
        self._thread: threading.Thread | None = None

    @property
    def url(self) -> str:
        host, port = self._httpd.server_address[:2]
        return f"http://{host}:{port}"

    def start(self) -> "MockDiarizationServer":
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()
        if self._thread is not None:
            self._thread.join()

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()

    def _handler(self):
        server = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def _send(self, code: int, body, content_type="application/json"):
                data = (json.dumps(body) if content_type == "application/json" else body).encode()
                self.send_response(code)
                self.send_header("Content-Type", content_type)
                self.send_header("Content-Length", str(len(data)))
                self.end_headers()
                self.wfile.write(data)

            def do_POST(self):
                if self.path.rstrip("/") != "/jobs":
                    return self._send(404, {"error": "not found"})
                length = int(self.headers.get("Content-Length", 0))
                self.rfile.read(length)
                time.sleep(server.upload_delay)
                with server._lock:
                    job_id = f"job{next(server._ids)}"
                    server.jobs[job_id] = {"filename": self.headers.get("X-Filename", ""), "polls": 0}
                self._send(202, {"job_id": job_id})

            def do_GET(self):
                parts = self.path.strip("/").split("/")
                if len(parts) < 2 or parts[0] != "jobs" or parts[1] not in server.jobs:
                    return self._send(404, {"error": "unknown job"})
                job = server.jobs[parts[1]]
                rttm = server.results.get(job["filename"], "")
                if len(parts) == 3 and parts[2] == "result":
                    time.sleep(server.download_delay)
                    return self._send(200, rttm, "text/plain")
                with server._lock:
                    job["polls"] += 1
                    polls = job["polls"]
                if polls <= server.pending_polls:
                    return self._send(200, {"status": "pending"})
                if job["filename"] in server.fail:
                    return self._send(200, {"status": "failed", "error": "mock failure"})
                if server.inline_result:
                    time.sleep(server.download_delay)
                    return self._send(200, {"status": "done", "result": rttm})
                return self._send(200, {"status": "done"})

        return Handler


def main(argv=None):
    parser = argparse.ArgumentParser(description="Serve canned RTTM results over the job/poll protocol.")
    parser.add_argument("rttm_dir", type=Path, help="directory of <audio-filename>.rttm results")
    parser.add_argument("--port", type=int, default=8765)
    parser.add_argument("--upload-delay", type=float, default=0.1)
    parser.add_argument("--pending-polls", type=int, default=2)
    parser.add_argument("--download-delay", type=float, default=0.05)
    args = parser.parse_args(argv)
    results = {p.stem: p.read_text() for p in args.rttm_dir.glob("*.rttm")}
    server = MockDiarizationServer(
        results=_ByStem(results), upload_delay=args.upload_delay, pending_polls=args.pending_polls,
        download_delay=args.download_delay, port=args.port,
    )
    print(f"mock server on {server.url}")
    server.start()
    try:
        while True:
            time.sleep(3600)
    except KeyboardInterrupt:
        server.stop()


class _ByStem(dict):
    """Look results up by audio file name regardless of its extension."""

    def get(self, key, default=None):
        return super().get(Path(key).stem, default)


if __name__ == "__main__":
    main()
