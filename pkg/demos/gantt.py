"""Draw a list schedule as an SVG Gantt chart.

Usage: python3 demos/gantt.py [-o chart.svg]
"""
import argparse
from pathlib import Path

from emsched import load_instance, render_svg, run_algorithm

HERE = Path(__file__).parent


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("-o", "--output", default="pipeline.svg")
    args = ap.parse_args()
    inst = load_instance(HERE / "pipeline_nodelay.json")
    s, cert = run_algorithm("list", inst)
    Path(args.output).write_text(render_svg(s, inst, title="list schedule"), encoding="utf-8")
    print(f"makespan {s.makespan:.4f} (bound {cert.lower_bound:.4f}), chart written to {args.output}")


if __name__ == "__main__":
    main()
