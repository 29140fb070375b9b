/** Optional microphone input via the platform speech API.
 *
 * Feature-detected: when the browser has no speech recognition, the mic
 * button never appears and everything works typed. Nothing in the viewer
 * (or its tests) depends on audio.
 */

type RecognitionCtor = new () => {
  lang: string;
  interimResults: boolean;
  maxAlternatives: number;
  onresult: ((event: { results: { 0: { 0: { transcript: string } } } }) => void) | null;
  onend: (() => void) | null;
  start(): void;
  stop(): void;
};

export function speechRecognitionCtor(): RecognitionCtor | null {
  if (typeof window === "undefined") return null;
  const w = window as unknown as Record<string, unknown>;
  return (w.SpeechRecognition ?? w.webkitSpeechRecognition ?? null) as RecognitionCtor | null;
}

export function attachMicrophone(button: HTMLButtonElement,
                                 onTranscript: (transcript: string) => void): boolean {
  const Ctor = speechRecognitionCtor();
  if (!Ctor) {
    button.hidden = true;
    return false;
  }
  button.hidden = false;
  button.addEventListener("click", () => {
    const recognition = new Ctor();
    recognition.lang = "en-IN";
    recognition.interimResults = false;
    recognition.maxAlternatives = 1;
    button.classList.add("listening");
    recognition.onresult = (event) => {
      onTranscript(event.results[0][0].transcript);
    };
    recognition.onend = () => button.classList.remove("listening");
    recognition.start();
  });
  return true;
}
