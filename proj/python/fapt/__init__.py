"""Fluid antenna port prediction toolkit.

Thin wrapper over the compiled extension; see the README for the CLI and the
file formats.
"""

from ._fapt import (  # noqa: F401
    ArrayGeometry,
    Model,
    PortGrid,
    PortIndex,
    __version__,
    channel_table,
    ezf_precoder,
    flat_to_port,
    gen_dataset,
    hold_last_predict,
    lr_at_epoch,
    nmse_loss,
    read_dataset,
    select_port,
    select_port_miso,
    sinr_and_se,
    table_accuracy,
    validation_nmse,
    vec_prony_predict,
)

__all__ = [
    "ArrayGeometry",
    "Model",
    "PortGrid",
    "PortIndex",
    "__version__",
    "channel_table",
    "ezf_precoder",
    "flat_to_port",
    "gen_dataset",
    "hold_last_predict",
    "lr_at_epoch",
    "nmse_loss",
    "read_dataset",
    "select_port",
    "select_port_miso",
    "sinr_and_se",
    "table_accuracy",
    "validation_nmse",
    "vec_prony_predict",
]
