"""Min-cut/max-flow engine with exact Ising image restoration."""

__version__ = "0.1.0"

from .netcore import (
    CutLabeling,
    DimacsError,
    GNetwork,
    Network,
    NetworkError,
    cut_capacity,
    energy_U,
    normalize_to_G,
    parse_dimacs,
    write_dimacs,
)
from .maxflow import (
    FlowResult,
    FrontierCondition,
    max_flow,
    min_cut_maximal,
    min_cut_minimal,
    restricted_solve,
    solve_gnetwork,
)
from .mnfc import (
    Fixability,
    LevelStats,
    MnfcConfig,
    check_fixable_subset,
    fix_nodes,
    local_estimates,
    partition_level,
    run_mnfc,
)
from .ising import (
    BinaryImage,
    EnergyParams,
    GrayImage,
    ImageError,
    build_binary_map_network,
    eval_U1,
    eval_U2,
    neighbor_pairs,
    preservation_bound,
)
from .layers import LayerStack, layer_energy, minimize_U1, stack_sum, threshold_decompose
from .qnet import build_q_network, coeff_d, minimize_U2, p_value, q_value
from .imaging import (
    ColorImage,
    NoiseSpec,
    apply_noise,
    metrics,
    moving_average_3x3,
    moving_median_3x3,
    read_image,
    restore_color,
    write_image,
)
from .oracle import EnumLimit, EnumerationLimitError, brute_min_cut, brute_min_U1, brute_min_U2
