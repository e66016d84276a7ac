// Browser audio capture. The server stores whatever container the
// browser produces, so no transcoding happens here. The media APIs are
// injectable for tests and unsupported browsers degrade to file upload.

export interface RecorderHandle {
  stop(): Promise<Blob>;
  cancel(): void;
}

export interface MediaDeps {
  getUserMedia(constraints: MediaStreamConstraints): Promise<MediaStream>;
  createRecorder(stream: MediaStream): MediaRecorder;
}

export function captureSupported(win: Window = window): boolean {
  return Boolean(win.navigator?.mediaDevices?.getUserMedia) && "MediaRecorder" in win;
}

function defaultDeps(): MediaDeps {
  return {
    getUserMedia: (constraints) => navigator.mediaDevices.getUserMedia(constraints),
    createRecorder: (stream) => new MediaRecorder(stream),
  };
}

export async function startRecording(deps: MediaDeps = defaultDeps()): Promise<RecorderHandle> {
  const stream = await deps.getUserMedia({ audio: true });
  const recorder = deps.createRecorder(stream);
  const chunks: Blob[] = [];
  recorder.ondataavailable = (event) => {
    if (event.data && event.data.size > 0) chunks.push(event.data);
  };
  const stopTracks = () => stream.getTracks().forEach((track) => track.stop());
  recorder.start();
  return {
    stop: () =>
      new Promise<Blob>((resolve) => {
        recorder.onstop = () => {
          stopTracks();
          resolve(new Blob(chunks, { type: recorder.mimeType || "audio/webm" }));
        };
        recorder.stop();
      }),
    cancel: () => {
      recorder.onstop = () => stopTracks();
      try {
        recorder.stop();
      } catch {
        stopTracks();
      }
    },
  };
}
