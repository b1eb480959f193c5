// One-click export: wrap exactly the bytes the service returned in a Blob
// and hand them to the browser. No re-encoding, no pretty-printing.

export function downloadText(name: string, text: string, mime: string): void {
  triggerDownload(name, new Blob([text], { type: mime }));
}

export function downloadBase64(name: string, base64: string, mime: string): void {
  const raw = atob(base64);
  const bytes = new Uint8Array(raw.length);
  for (let i = 0; i < raw.length; i++) bytes[i] = raw.charCodeAt(i);
  triggerDownload(name, new Blob([bytes], { type: mime }));
}

function triggerDownload(name: string, blob: Blob): void {
  const url = URL.createObjectURL(blob);
  const link = document.createElement("a");
  link.href = url;
  link.download = name;
  document.body.appendChild(link);
  link.click();
  document.body.removeChild(link);
  URL.revokeObjectURL(url);
}
