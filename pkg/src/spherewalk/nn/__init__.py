from .net import ReluNet, affine_net, identity_net, scale_output, select_rows
from .calculus import augment, compose, linear_combine, stack_parallel
from .build import (
    KAPPA_PRODUCT,
    abs_net,
    chain_net,
    chain_size_bound,
    hypercube_distance_net,
    min_tree_net,
    piecewise_linear_net,
    product_error_budget,
    product_net,
    product_refinements,
    relu_shift_net,
    square_error,
    square_net,
    step_net,
)
from .assemble import (
    AssemblyBudgetError,
    FrozenRandomness,
    SizeAudit,
    assemble_solution_net,
    assembled_size_bound,
    extension_net,
)
