from tqdm import tqdm
import threading
import time

def progress_bar(total: int, desc: str, stop_event: threading.Event, lock: threading.Lock, done_ref: list, unit: str = "pole"):
    """
    Progress bar that increments for every finished work item
    """
    bar = tqdm(total=total, desc=desc, unit=unit, ncols=100, leave=True)
    last_count = 0

    while not stop_event.is_set():
        with lock:
            current_count = done_ref[0]

        increment = current_count - last_count
        if increment > 0:
            bar.update(increment)
            last_count = current_count

        time.sleep(0.1)

    with lock:
        final_count = done_ref[0]

    if final_count > last_count:
        bar.update(final_count - last_count)

    bar.close()


class ProgressTracker:
    """
    Runs `progress_bar` on a daemon thread while a worker pool fills `done_ref`.

    Disabled trackers keep the counter but draw nothing.
    """

    def __init__(self, total: int, desc: str, enabled: bool, unit: str = "pole"):
        self.total = total
        self.desc = desc
        self.enabled = enabled
        self.unit = unit
        self.lock = threading.Lock()
        self.stop_event = threading.Event()
        self.done_ref = [0]
        self.thread = None

    def __enter__(self) -> "ProgressTracker":
        if self.enabled:
            self.thread = threading.Thread(
                target=progress_bar,
                args=(self.total, self.desc, self.stop_event, self.lock, self.done_ref, self.unit),
                daemon=True
            )
            self.thread.start()
        return self

    def advance(self, count: int = 1) -> None:
        with self.lock:
            self.done_ref[0] += count

    def __exit__(self, exc_type, exc, tb) -> None:
        self.stop_event.set()
        if self.thread is not None and self.thread.is_alive():
            self.thread.join(timeout=2)
