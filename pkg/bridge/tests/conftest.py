import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest


class _ScriptedHandler(BaseHTTPRequestHandler):
    def do_POST(self):
        server = self.server
        length = int(self.headers.get("Content-Length", 0))
        body = json.loads(self.rfile.read(length)) if length else {}
        server.seen.append(body)
        action = server.script.pop(0) if server.script else {"content": "[]"}
        status = action.get("status", 200)
        if status != 200:
            self.send_response(status)
            self.send_header("Content-Length", "0")
            self.end_headers()
            return
        payload = {
            "choices": [{"message": {"content": action["content"]}}],
            "usage": {"prompt_tokens": 10, "completion_tokens": 5},
        }
        data = json.dumps(payload).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


class ScriptedEndpoint:
    """Local chat-completions stand-in that replays a scripted response list."""

    def __init__(self):
        self.server = HTTPServer(("127.0.0.1", 0), _ScriptedHandler)
        self.server.script = []
        self.server.seen = []
        self._thread = threading.Thread(target=self.server.serve_forever, daemon=True)
        self._thread.start()

    @property
    def url(self) -> str:
        host, port = self.server.server_address
        return f"http://{host}:{port}"

    def script(self, *actions):
        """Queue responses: strings are contents, ints are HTTP error codes."""
        for action in actions:
            if isinstance(action, int):
                self.server.script.append({"status": action})
            else:
                self.server.script.append({"content": action})

    @property
    def calls(self) -> int:
        return len(self.server.seen)

    def close(self):
        self.server.shutdown()
        self.server.server_close()


@pytest.fixture
def endpoint():
    ep = ScriptedEndpoint()
    yield ep
    ep.close()


@pytest.fixture
def queries_file(tmp_path):
    path = tmp_path / "queries.jsonl"
    records = [
        {"id": "q1", "question": "Which river did Marie Curie cross in 1903?", "answer": "Seine"},
        {"id": "q2", "question": "Who led Acme during the merger?", "answer": "Bob"},
    ]
    path.write_text("\n".join(json.dumps(r) for r in records) + "\n")
    return path
