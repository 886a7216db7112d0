"""
    Feedback overhead breakdown, raw and amortized over the angle coherence time.
"""
from ris_feedback.cli import ExperimentCommand


def format_overhead(system, bits_values):
    from ris_feedback.core.feedback import overhead
    from ris_feedback.core.schemes import conventional_overhead, overhead_matched_bits

    lines = [
        'G_t={g} B0={b0} L1={l1} L2={l2} step-1 fraction={f:g} coherence ratio={r}'.format(
            g=system.G_t, b0=system.B0, l1=system.L1, l2=system.L2, f=system.step1_user_fraction,
            r=system.coherence_ratio),
        '{:>4} {:>8} {:>8} {:>8} {:>10} {:>10} {:>10} {:>10} {:>14}'.format(
            'B', 'step1', 'step2', 'step3', 'raw', 'step1/T', 'step2/T', 'per user', 'conventional'),
    ]
    for B in bits_values:
        config = system.replace(B=B)
        report = overhead(config)
        matched = overhead_matched_bits(config)
        lines.append('{:>4} {:>8} {:>8} {:>8} {:>10} {:>10.1f} {:>10.1f} {:>10.1f} {:>14}'.format(
            B, report.step1_bits, report.step2_bits, report.step3_bits, report.raw_bits,
            report.step1_amortized, report.step2_amortized, report.per_user_amortized_bits,
            '{m} bits ({o:.1f})'.format(m=matched, o=conventional_overhead(config, matched).per_user_amortized_bits),
        ))
    return '\n'.join(lines)


class Command(ExperimentCommand):
    help = 'Print the per-step and amortized per-user feedback overhead, for each --bits value if given'
    always_summarize = True

    def run(self, manifest, system, ceo):
        return format_overhead(system, manifest.bits or (system.B,))
