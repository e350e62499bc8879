/** WebSocket step stream: one validated frame per executed simulation step. */
import { Frame, parseFrame } from "./types.js";

export function connectStream(
  url: string,
  onFrame: (frame: Frame) => void,
  onClose: () => void
): WebSocket {
  const socket = new WebSocket(url);
  socket.onmessage = (evt) => {
    try {
      onFrame(parseFrame(JSON.parse(String(evt.data))));
    } catch (err) {
      console.error("stream frame rejected", err);
    }
  };
  socket.onclose = () => onClose();
  return socket;
}
