"""CLI interface for desk-matting."""

from contextlib import contextmanager
from pathlib import Path
from typing import TypeVar

import click
from pydantic import BaseModel, ValidationError

from desk_matting.config import MattingError, get_settings
from desk_matting.datasynth import assemble_dataset
from desk_matting.harness import ablate, evaluate_checkpoint, infer, train
from desk_matting.models import AblationSpec, SynthConfig, TrainConfig

ConfigT = TypeVar("ConfigT", bound=BaseModel)


@click.group()
def cli():
    """desk-matting: trimap-free matting network, data synthesis and evaluation."""
    pass


@contextmanager
def _user_errors():
    try:
        yield
    except ValidationError as e:
        raise click.ClickException(f"invalid configuration:\n{e}") from e
    except MattingError as e:
        raise click.ClickException(str(e)) from e


def _load_config(path: Path | None, model: type[ConfigT]) -> ConfigT:
    if path is None:
        return model()
    return model.model_validate_json(path.read_text(encoding="utf-8"))


def _default_out(name: str) -> Path:
    return get_settings().output_dir / name


@cli.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None)
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), default=None, help="Dataset directory")
def synth(config_path: Path | None, out: Path | None):
    """Synthesize the composited train/test dataset."""
    with _user_errors():
        config = _load_config(config_path, SynthConfig)
        out = out or TrainConfig().dataset_dir
        train_samples, test_samples = assemble_dataset(config, out)
    click.echo(f"Wrote {len(train_samples)} train and {len(test_samples)} test samples to {out}")


@cli.command("train")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None)
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), default=None, help="Run directory")
def train_command(config_path: Path | None, out: Path | None):
    """Train a model; writes losses.csv and checkpoints/."""
    with _user_errors():
        config = _load_config(config_path, TrainConfig)
        out = out or _default_out("run")
        click.echo(f"Training for {config.max_iters} iterations (data: {config.dataset_dir})...")
        result = train(config, out)
    last = result.history[-1]
    click.echo(f"Final L_total={last['L_total']:.4f} after {result.iterations} iterations")
    click.echo(f"Checkpoint saved: {result.final_checkpoint}")


@cli.command("eval")
@click.option("--checkpoint", required=True, type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--data", required=True, type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--out", required=True, type=click.Path(dir_okay=False, path_type=Path), help="Metrics CSV")
@click.option("--split", default="test", show_default=True)
def eval_command(checkpoint: Path, data: Path, out: Path, split: str):
    """Evaluate a checkpoint on a dataset split."""
    with _user_errors():
        report = evaluate_checkpoint(checkpoint, data, out, split=split)
    click.echo(
        f"SAD={report.sad:.4f} MSE={report.mse:.5f} Grad={report.grad:.4f} Conn={report.conn:.4f} "
        f"({report.count} images)"
    )
    click.echo(f"Metrics saved: {out}")


@cli.command("ablate")
@click.option("--spec", "spec_path", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), default=None)
def ablate_command(spec_path: Path, out: Path | None):
    """Train and evaluate every variant of an ablation axis."""
    with _user_errors():
        spec = _load_config(spec_path, AblationSpec)
        out = out or _default_out(f"ablate_{spec.axis.value}")
        table = ablate(spec, out)
    click.echo(table.format())


@cli.command("infer")
@click.option("--checkpoint", required=True, type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--image", "image_path", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--out", required=True, type=click.Path(dir_okay=False, path_type=Path), help="Alpha PNG")
@click.option("--export-taps", is_flag=True, help="Also write s1..s5 and g* feature visualisations")
def infer_command(checkpoint: Path, image_path: Path, out: Path, export_taps: bool):
    """Predict the alpha matte of one image."""
    with _user_errors():
        written = infer(checkpoint, image_path, out, export_taps=export_taps)
    click.echo(f"Alpha saved: {written[0]}")
    if len(written) > 1:
        click.echo(f"Feature maps: {len(written) - 1} in {written[1].parent}")


if __name__ == "__main__":
    cli()
