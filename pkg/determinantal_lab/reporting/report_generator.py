"""
Report generation: versioned JSON artifacts and console summaries.
"""

import sys
from typing import Dict, List, Optional, TextIO

from .. import __version__
from ..core.checks import CheckReport
from ..core.kernels import Kernel, ValidationReport
from ..core.measure import DistributionTable
from ..utils.file_handler import FileHandler
from ..utils.hashing import HashingUtils


class ReportGenerator:
    """Builds machine-readable reports and human summaries."""

    def __init__(self, stream: Optional[TextIO] = None, quiet: bool = False):
        self.stream = stream
        self.quiet = quiet
        self.verdict_marks = {True: '✓', False: '✗'}

    def _out(self) -> TextIO:
        return self.stream if self.stream is not None else sys.stderr

    def envelope(self, command: str, payload: Dict, kernel: Optional[Kernel] = None) -> Dict:
        """Wrap a payload with the version and, when given, the kernel fingerprint."""
        report = {'version': __version__, 'command': command}
        if kernel is not None:
            report['kernel_fingerprint'] = HashingUtils.kernel_fingerprint(kernel)
        report.update(payload)
        return report

    @staticmethod
    def render(report: Dict) -> str:
        return FileHandler.dumps(report)

    def _banner(self, title: str) -> None:
        out = self._out()
        print("\n" + "=" * 60, file=out)
        print(title, file=out)
        print("=" * 60, file=out)

    def _footer(self) -> None:
        print("=" * 60, file=self._out())

    def print_validation(self, report: ValidationReport) -> None:
        if self.quiet:
            return
        out = self._out()
        self._banner("KERNEL VALIDATION")
        print(f"Size: {report.size}", file=out)
        print(f"Hermitian defect: {report.hermitian_defect:.3e}", file=out)
        print(f"Eigenvalue range: [{report.min_eigenvalue:.6g}, {report.max_eigenvalue:.6g}]", file=out)
        print(f"Verdict: {self.verdict_marks[report.passed]} "
              f"{'positive contraction' if report.passed else 'invalid'}", file=out)
        for problem in report.problems:
            print(f"  - {problem}", file=out)
        self._footer()

    def print_distribution(self, table: DistributionTable, top: int = 10) -> None:
        """Most likely subsets and the marginals of a distribution table."""
        if self.quiet:
            return
        out = self._out()
        self._banner("DISTRIBUTION")
        support = table.support(1e-15)
        print(f"Ground set: {', '.join(table.ground.labels)}", file=out)
        print(f"Support size: {len(support)} of {table.mass.size}", file=out)
        print(f"\nTop {min(top, len(support))} subsets:", file=out)
        for mask in sorted(support, key=lambda m: (-table.mass[m], m))[:top]:
            subset = '{' + ', '.join(table.ground.labels_of(mask)) + '}'
            print(f"  {subset:<30} {table.mass[mask]:.6f}", file=out)
        print("\nMarginals:", file=out)
        for label, value in zip(table.ground.labels, table.marginals()):
            print(f"  {label}: {value:.6f}", file=out)
        self._footer()

    def print_check(self, report: CheckReport) -> None:
        if self.quiet:
            return
        out = self._out()
        self._banner(f"SUITE {report.suite.upper()} ({report.kind})")
        print(f"Instances: {report.instances}", file=out)
        print(f"Worst margin: {report.worst_margin:.3e}", file=out)
        print(f"Verdict: {self.verdict_marks[report.passed]} {'passed' if report.passed else 'failed'}", file=out)
        if report.flags:
            print(f"Flags: {len(report.flags)} candidate counterexamples", file=out)
        self._footer()

    def print_lines(self, title: str, lines: List[str]) -> None:
        """Generic banner with one line per entry."""
        if self.quiet:
            return
        out = self._out()
        self._banner(title)
        for line in lines:
            print(line, file=out)
        self._footer()
