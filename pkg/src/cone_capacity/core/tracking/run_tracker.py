import json
from datetime import datetime
from pathlib import Path


class RunTracker:
    """Session bookkeeping for one CLI command, appended to a JSON-lines log"""

    def __init__(self, command: str, log_file: Path):
        self.command = command
        self.log_file = Path(log_file)
        self.reset_session()

    def reset_session(self):
        """Reset session counters"""
        self.session = {
            'command': self.command,
            'start_time': datetime.now().isoformat(),
            'solves': 0,
            'newton_iterations': 0,
            'solve_seconds': 0.0,
            'exit_status': None
        }

    def track_solve(self, report) -> None:
        """Fold a SolveReport into the session totals"""
        self.session['solves'] += 1
        self.session['newton_iterations'] += report.iterations
        self.session['solve_seconds'] += report.wall_time

    def save_session(self, exit_status: int):
        """Append session data to the log file"""
        session_data = {
            **self.session,
            'end_time': datetime.now().isoformat(),
            'exit_status': exit_status
        }
        self.log_file.parent.mkdir(parents=True, exist_ok=True)
        with self.log_file.open('a') as f:
            f.write(json.dumps(session_data) + '\n')
