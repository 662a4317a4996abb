from .hausdorff import (
    MetricReport,
    directed_hausdorff,
    hausdorff,
    cluster_hausdorff,
    metric_report
)

__all__ = [
    'MetricReport',
    'directed_hausdorff',
    'hausdorff',
    'cluster_hausdorff',
    'metric_report'
]
