"""Flat ``key = value`` run configuration with paper and desk-scale presets."""

from dataclasses import dataclass

from .ensemble import PAPER_K, PAPER_THRESHOLD
from .model import PAPER_FILTER_SIZES, Hyperparams
from .nadam import NadamConfig
from .train import TrainConfig


def _int_list(text):
    if isinstance(text, (tuple, list)):
        return tuple(int(v) for v in text)
    return tuple(int(v) for v in str(text).replace(" ", "").split(",") if v)


def _bool(text):
    if isinstance(text, bool):
        return text
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _path(text):
    return str(text)


@dataclass(frozen=True)
class Key:
    parse: object
    default: object
    help: str


KEYS = {
    # network
    "d": Key(int, 200, "embedding dimension; must match the embedding file"),
    "maxl": Key(int, 99, "tweet length in tokens; longer tweets are truncated"),
    "filter_sizes": Key(_int_list, PAPER_FILTER_SIZES, "comma-separated filter widths, one bank each"),
    "f": Key(int, 50, "feature maps per filter bank"),
    "dropout_p": Key(float, 0.3, "dropout fraction on the pooled features"),
    "fc_units": Key(int, 64, "width of the hidden fully connected layer"),
    # training
    "batch_size": Key(int, 50, "mini-batch size"),
    "max_epochs": Key(int, 20, "epochs per network"),
    "shuffle_seed": Key(int, 0, "seed of the per-epoch shuffling"),
    "init_seed": Key(int, 0, "weight initialization seed (train command)"),
    "trainable_embeddings": Key(_bool, False, "fine-tune embeddings (unsupported, must be false)"),
    # optimizer
    "lr": Key(float, 0.002, "Nadam learning rate"),
    "beta1": Key(float, 0.9, "Nadam first-moment decay"),
    "beta2": Key(float, 0.999, "Nadam second-moment decay"),
    "eps": Key(float, 1e-8, "Nadam denominator guard"),
    "schedule_decay": Key(float, 0.004, "Nadam momentum warm-up decay"),
    # ensemble
    "k": Key(int, PAPER_K, "ensemble size"),
    "n_candidates": Key(int, 100, "candidate networks trained for selection"),
    "threshold": Key(float, PAPER_THRESHOLD, "max dev agreement with any prior member"),
    "seed_base": Key(int, 0, "init seed of the first candidate"),
    "jobs": Key(int, 1, "parallel candidate trainings"),
    # data
    "embeddings": Key(_path, "", "embedding file (text 'V D' format)"),
    "oov_seed": Key(int, 0, "seed for out-of-vocabulary vectors"),
    "train": Key(_path, "", "training set (id<TAB>label<TAB>text)"),
    "dev": Key(_path, "", "development set, same format"),
    "output_dir": Key(_path, "out", "directory for models, manifests and reports"),
}

DESK_PRESET = {
    "d": 10,
    "maxl": 12,
    "f": 4,
    "fc_units": 16,
    "batch_size": 10,
    "max_epochs": 15,
    "n_candidates": 6,
    "k": 3,
}

PRESETS = {"paper": {}, "desk": DESK_PRESET}

class ConfigError(ValueError):
    pass


def defaults(preset="paper"):
    if preset not in PRESETS:
        raise ConfigError(f"unknown preset {preset!r}; choose from {', '.join(PRESETS)}")
    cfg = {name: key.default for name, key in KEYS.items()}
    cfg.update(PRESETS[preset])
    return cfg


def set_value(cfg, name, raw):
    if name not in KEYS:
        raise ConfigError(f"unknown config key {name!r}")
    try:
        cfg[name] = KEYS[name].parse(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {exc}") from None


def read_config_file(path, cfg):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}: expected key = value at line {lineno}")
            name, value = (s.strip() for s in line.split("=", 1))
            set_value(cfg, name, value)
    return cfg


def format_value(value):
    if isinstance(value, tuple):
        return ",".join(str(v) for v in value)
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def dump(cfg):
    return "".join(f"{name} = {format_value(cfg[name])}\n" for name in KEYS)


def echo(cfg):
    """Config as sorted ``key: str`` pairs for artifact headers."""
    return {name: format_value(cfg[name]) for name in sorted(cfg)}


def hyperparams(cfg):
    return Hyperparams(d=cfg["d"], maxl=cfg["maxl"], filter_sizes=cfg["filter_sizes"],
                       f=cfg["f"], dropout_p=cfg["dropout_p"], fc_units=cfg["fc_units"])


def train_config(cfg):
    return TrainConfig(batch_size=cfg["batch_size"], max_epochs=cfg["max_epochs"],
                       shuffle_seed=cfg["shuffle_seed"])


def nadam_config(cfg):
    return NadamConfig(lr=cfg["lr"], beta1=cfg["beta1"], beta2=cfg["beta2"], eps=cfg["eps"],
                       schedule_decay=cfg["schedule_decay"])
