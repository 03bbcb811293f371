// In-process stand-in for the harness API, serving the e2e fixture with a
// stateful override queue and a request log for write-discipline checks.

import http from 'node:http';
import { AddressInfo } from 'node:net';

export interface RequestRecord {
  method: string;
  path: string;
}

export interface MockServer {
  url: string;
  requests: RequestRecord[];
  close(): Promise<void>;
}

interface Fixture {
  status: Record<string, unknown>;
  deps: unknown;
  sections: unknown;
  bottlenecks: unknown;
  growth: unknown;
}

export function startMockServer(fixture: Fixture, secret: string): Promise<MockServer> {
  const requests: RequestRecord[] = [];
  let pendingOverrides = Number(fixture.status['pending_overrides'] ?? 0);
  let paused = Boolean(fixture.status['paused']);

  const currentStatus = () => ({
    ...fixture.status,
    pending_overrides: pendingOverrides,
    paused,
  });

  const server = http.createServer((req, res) => {
    const path = (req.url ?? '/').split('?')[0];
    requests.push({ method: req.method ?? '', path });

    const send = (code: number, payload: unknown) => {
      const body = JSON.stringify(payload);
      res.writeHead(code, { 'Content-Type': 'application/json' });
      res.end(body);
    };

    if (req.method === 'GET') {
      switch (path) {
        case '/status':
          return send(200, currentStatus());
        case '/deps':
          return send(200, fixture.deps);
        case '/sections':
          return send(200, fixture.sections);
        case '/bottlenecks':
          return send(200, fixture.bottlenecks);
        case '/growth':
          return send(200, fixture.growth);
        default:
          return send(404, { error: `unknown path ${path}` });
      }
    }

    if (req.method === 'POST') {
      if (!['/override', '/pause', '/resume'].includes(path)) {
        return send(404, { error: `unknown path ${path}` });
      }
      if (req.headers['x-afloop-secret'] !== secret) {
        return send(401, { error: 'bad or missing secret' });
      }
      let raw = '';
      req.on('data', (chunk) => (raw += chunk));
      req.on('end', () => {
        if (path === '/override') {
          let text = '';
          try {
            text = JSON.parse(raw || '{}').text ?? '';
          } catch {
            text = '';
          }
          if (!text) return send(400, { error: 'override text must be non-empty' });
          pendingOverrides += 1;
          return send(200, { status: currentStatus() });
        }
        if (path === '/pause') {
          if (paused) return send(409, { error: 'already paused' });
          paused = true;
          return send(200, { status: currentStatus() });
        }
        if (!paused) return send(409, { error: 'not paused' });
        paused = false;
        return send(200, { status: currentStatus() });
      });
      return;
    }

    send(405, { error: 'method not allowed' });
  });

  return new Promise((resolve) => {
    server.listen(0, '127.0.0.1', () => {
      const { port } = server.address() as AddressInfo;
      resolve({
        url: `http://127.0.0.1:${port}`,
        requests,
        close: () =>
          new Promise<void>((done, fail) =>
            server.close((err) => (err ? fail(err) : done())),
          ),
      });
    });
  });
}
