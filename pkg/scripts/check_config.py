#!/usr/bin/env python3
"""检查硬件配置文件（.xcfg.json）"""
import sys
from pathlib import Path

# 添加项目根目录到路径
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

import numpy as np

from hwconfig.data_format import load_config
from hwconfig.validator import validate_config
from utils.exceptions import ParseError
from utils.formatter import format_validation_message


def main():
    """检查硬件配置"""
    print("=" * 50)
    print("检查硬件配置文件")
    print("=" * 50)

    if len(sys.argv) != 2:
        print("用法: python3 scripts/check_config.py <network.xcfg.json>")
        return 1

    try:
        config = load_config(sys.argv[1])
    except (OSError, ParseError) as e:
        print(f"❌ 读取配置失败: {e}")
        return 3

    print(f"\ndt: {config.dt}")
    print(f"维度: C={config.C}, H={config.H}, O={config.O}, S={config.S}")
    print(f"\n📊 统计信息:")
    print(f"  - 非零输入权重: {int(np.count_nonzero(config.w_in))}")
    print(f"  - 非零隐藏权重: {int(np.count_nonzero(config.w_rec))}")
    print(f"  - 非零输出权重: {int(np.count_nonzero(config.w_out))}")
    print(f"  - 别名数量: {sum(1 for entry in config.aliases if entry)}")
    print(f"  - 隐藏层阈值范围: [{int(np.min(config.threshold_hid))}, {int(np.max(config.threshold_hid))}]")
    print(f"  - dash 最大值: {max(int(np.max(d)) for d in (config.dash_mem_hid, config.dash_syn_hid, config.dash_mem_out, config.dash_syn_out))}")

    report = validate_config(config)
    print("\n" + format_validation_message(report))
    print("\n" + "=" * 50)
    return 0 if report.ok else 2


if __name__ == "__main__":
    sys.exit(main())
