"""报告格式化工具（命令行输出与摘要文件）"""


def format_validation_message(report) -> str:
    """格式化硬件配置校验报告"""
    if report.ok:
        return "✅ 硬件配置校验通过"
    lines = [f"❌ 硬件配置未通过校验（{len(report.violations)} 项）:"]
    for violation in report.violations:
        lines.append(f"   • {violation.format()}")
    return "\n".join(lines)


def format_design_rule_message(report) -> str:
    """格式化设计规则报告"""
    if report.ok:
        return "✅ 设计规则检查通过"
    lines = [f"❌ 设计规则检查发现 {len(report.violations)} 个问题:"]
    for violation in report.violations:
        lines.append(f"   • [{violation.rule_id}] {violation.offender}: {violation.message}")
    return "\n".join(lines)


def format_graph_summary(graph) -> str:
    """计算图摘要：遍历顺序列表 + 设计规则报告"""
    from graph_ir.traversal import holder_levels, traverse
    from mapper.design_rules import check_design_rules

    lines = [
        f"📦 网络: {graph.name}",
        f"   输入 {graph.size_in} → 输出 {graph.size_out}，Holder 嵌套层数 {holder_levels(graph)}",
        "",
        "depth  module",
    ]
    for module, depth in traverse(graph):
        lines.append(f"{depth:>5}  {module.kind} {module.name} ({module.size_in}→{module.size_out})")
    lines.append("")
    lines.append(format_design_rule_message(check_design_rules(graph)))
    return "\n".join(lines) + "\n"


def format_comparison_summary(report) -> str:
    """格式化记录比较报告"""
    if report.exact_match:
        head = "✅ 完全一致"
    else:
        head = f"⚠️ 第 {report.first_divergence_step} 步开始不一致"
    lines = [head]
    for name, value in sorted(report.max_abs_diff.items()):
        lines.append(f"   {name}: 最大绝对差 {value:.6g}")
    lines.append(f"   输出脉冲相对差: {report.relative_spike_diff:.4f}")
    if report.within_tolerance is not None:
        lines.append(f"   容忍度内: {'是' if report.within_tolerance else '否'}")
    return "\n".join(lines)
