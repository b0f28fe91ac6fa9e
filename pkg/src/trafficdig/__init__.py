"""Directed information graphs of traffic sensor networks.

Flow counts are quantized, pairwise directed information is estimated with
the rest of the network as a causal conditioning set, and the normalized
ratios are thresholded into a graph.  Simulators for queue-based and cell
transmission traffic are in :mod:`trafficdig.sim`.
"""

from .bounds import DetectionBounds, detection_bounds, regularized_gamma_p
from .ctw import (ContextTreeModel, causally_conditioned_entropy_ct, ct_predict, ct_update,
                  directed_info_and_entropy_ct, directed_info_ct)
from .empirical import (BlockCountTable, causally_conditioned_entropy_emp,
                        conditional_directed_info_emp, count_blocks, directed_info_emp)
from .graph import (CausalGraphResult, ConsistencyError, DirectedInformationGraph, estimate_dig,
                    normalize_di, threshold_graph)
from .io import dumps_result, export_dot, loads_result
from .lag import LagProfile, coefficient_of_determination, cross_covariance, estimate_depth
from .series import (FlowQuantizer, FlowSeries, IngestError, QuantizedSeries, QuantizerSpec,
                     combine_symbols, fit_quantizer, ingest_csv, quantize, read_csv,
                     split_symbols, write_csv)

__version__ = "0.1.0"
