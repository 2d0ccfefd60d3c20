#!/usr/bin/env python3
"""运行演示网络流水线并冻结产物哈希（tests/golden/demo_hashes.json）"""
import sys
import tempfile
from pathlib import Path

# 添加项目根目录到路径
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from harness.pipeline import PipelineOptions, run_pipeline
from utils.helpers import canonical_dumps, file_sha256, write_text

DEMO_NETWORK = project_root / "networks" / "demo.json"
GOLDEN_FILE = project_root / "tests" / "golden" / "demo_hashes.json"
GOLDEN_SEED = 42
GOLDEN_STEPS = 200
GOLDEN_RATE = 50.0


def golden_options(out_dir: str) -> PipelineOptions:
    """黄金测试与本脚本共用的流水线参数"""
    return PipelineOptions(
        out_dir=out_dir,
        dt=0.001,
        seed=GOLDEN_SEED,
        steps=GOLDEN_STEPS,
        input_rate=GOLDEN_RATE,
        quantize_method="global",
        tolerance=0.25,
    )


def main():
    with tempfile.TemporaryDirectory() as tmp:
        result = run_pipeline(DEMO_NETWORK, golden_options(tmp))
        hashes = {name: file_sha256(path) for name, path in result.artifacts.items()}

    write_text(GOLDEN_FILE, canonical_dumps(hashes))
    print(f"✅ 已写入 {len(hashes)} 个产物哈希: {GOLDEN_FILE}")
    for name in sorted(hashes):
        print(f"  - {name}: {hashes[name]}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
