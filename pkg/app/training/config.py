"""Training hyperparameters and the topology search space."""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.errors import SearchError
from app.model.config import ConvSpec, DenseSpec, FlattenSpec, ModelConfig, PoolSpec

Range = tuple[int, int]


class TrainConfig(BaseModel):
    """Defaults are the best-performing settings: NAdam at 0.002, batches of 32,
    dropout 0.5, L2 0.01, and early stopping after two epochs without improvement."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    lr: float = Field(default=0.002, ge=0.0)
    batch_size: int = Field(default=32, ge=1)
    dropout_rate: float = Field(default=0.5, ge=0.0, lt=1.0)
    l2_lambda: float = Field(default=0.01, ge=0.0)
    patience_epochs: int = Field(default=2, ge=1)
    max_epochs: int = Field(default=100, ge=1)
    seed: int = 0
    sharpen: bool = False
    rotations: bool = False
    val_fraction: float = Field(default=0.1, gt=0.0, lt=1.0)


class SearchSpace(BaseModel):
    """Inclusive ranges sampled uniformly by :func:`topology_search`.

    ``conv_filters``, ``conv_kernels`` and ``fc_sizes`` optionally narrow the
    range for individual layer positions; positions past their end use the
    global range.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    conv_layers: Range = (1, 5)
    use_maxpool: tuple[bool, ...] = (True, False)
    filters: Range = (8, 256)
    kernel: Range = (2, 5)
    fc_layers: Range = (1, 4)
    fc_size: Range = (16, 512)
    input_size: Range = (100, 300)
    conv_filters: tuple[Range, ...] = ()
    conv_kernels: tuple[Range, ...] = ()
    fc_sizes: tuple[Range, ...] = ()

    @model_validator(mode="after")
    def _ordered(self) -> SearchSpace:
        named: list[tuple[str, Range]] = [
            (name, getattr(self, name))
            for name in ("conv_layers", "filters", "kernel", "fc_layers", "fc_size", "input_size")
        ]
        for name in ("conv_filters", "conv_kernels", "fc_sizes"):
            named += [(f"{name}[{i}]", r) for i, r in enumerate(getattr(self, name))]
        for name, (lo, hi) in named:
            if lo < 1 or lo > hi:
                raise ValueError(f"{name} range must satisfy 1 <= lo <= hi, got ({lo}, {hi})")
        if not self.use_maxpool:
            raise ValueError("use_maxpool must allow at least one value")
        return self

    def filters_at(self, position: int) -> Range:
        return self.conv_filters[position] if position < len(self.conv_filters) else self.filters

    def kernel_at(self, position: int) -> Range:
        return self.conv_kernels[position] if position < len(self.conv_kernels) else self.kernel

    def fc_size_at(self, position: int) -> Range:
        return self.fc_sizes[position] if position < len(self.fc_sizes) else self.fc_size

    def admits(self, config: ModelConfig) -> bool:
        """True when ``config`` could have been sampled from this space."""

        convs = [s for s in config.layers if isinstance(s, ConvSpec)]
        hidden = [s for s in config.layers if isinstance(s, DenseSpec)][:-1]
        pooled = any(isinstance(s, PoolSpec) for s in config.layers)

        def within(value: int, bounds: Range) -> bool:
            return bounds[0] <= value <= bounds[1]

        return (
            within(len(convs), self.conv_layers)
            and pooled in self.use_maxpool
            and within(len(hidden), self.fc_layers)
            and within(config.input_size, self.input_size)
            and all(within(s.filters, self.filters_at(i)) for i, s in enumerate(convs))
            and all(s.kernel[0] == s.kernel[1] and within(s.kernel[0], self.kernel_at(i)) for i, s in enumerate(convs))
            and all(within(s.units, self.fc_size_at(i)) for i, s in enumerate(hidden))
        )

    @classmethod
    def pinned(cls, config: ModelConfig) -> SearchSpace:
        """Space whose only member is ``config``'s topology.

        Only topologies the sampler can produce are accepted: square unit-stride
        kernels, each optionally followed by a 2x2 pool, then flatten and dense layers.
        """

        layers = list(config.layers)
        convs: list[ConvSpec] = []
        pooled: set[bool] = set()
        while layers and isinstance(layers[0], ConvSpec):
            conv = layers.pop(0)
            if conv.kernel[0] != conv.kernel[1] or conv.stride != (1, 1):
                raise SearchError("only square unit-stride kernels can be pinned")
            convs.append(conv)
            has_pool = bool(layers) and isinstance(layers[0], PoolSpec)
            if has_pool:
                pool = layers.pop(0)
                if pool.window != (2, 2) or pool.stride != (2, 2):
                    raise SearchError("only 2x2 pooling with stride 2 can be pinned")
            pooled.add(has_pool)
        if not convs or len(pooled) != 1 or not layers or not isinstance(layers.pop(0), FlattenSpec):
            raise SearchError("topology is not of the form conv[+pool]... flatten dense...")
        if not layers or not all(isinstance(s, DenseSpec) for s in layers):
            raise SearchError("topology must end in dense layers")
        hidden = [s.units for s in layers[:-1]]
        if not hidden:
            raise SearchError("topology needs at least one hidden dense layer")

        return cls(
            conv_layers=(len(convs), len(convs)),
            use_maxpool=(pooled.pop(),),
            fc_layers=(len(hidden), len(hidden)),
            input_size=(config.input_size, config.input_size),
            conv_filters=tuple((s.filters, s.filters) for s in convs),
            conv_kernels=tuple((s.kernel[0], s.kernel[0]) for s in convs),
            fc_sizes=tuple((u, u) for u in hidden),
        )
