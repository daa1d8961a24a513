from pydantic import BaseModel, Field


class MetricReport(BaseModel):
    """Matting metrics averaged over a prediction set."""

    sad: float = Field(ge=0.0, description="Sum of absolute differences / 1000")
    mse: float = Field(ge=0.0)
    grad: float = Field(ge=0.0, description="Gradient error / 1000")
    conn: float = Field(ge=0.0, description="Connectivity error / 1000")
    region: str = "whole_image"
    count: int = 1


class AblationRow(BaseModel):
    """One trained and evaluated ablation variant."""

    label: str
    report: MetricReport
    reference: tuple[float, float, float, float] | None = None


class AblationTable(BaseModel):
    axis: str
    rows: list[AblationRow] = Field(default_factory=list)

    def format(self) -> str:
        header = f"{'Variant':<16}{'SAD':>10}{'MSE':>10}{'Grad':>10}{'Conn':>10}   reference (SAD/MSE/Grad/Conn)"
        lines = [f"Ablation: {self.axis}", header, "-" * len(header)]
        for row in self.rows:
            r = row.report
            ref = "-"
            if row.reference is not None:
                ref = "{:.2f} / {:.4f} / {:.2f} / {:.2f}".format(*row.reference)
            lines.append(
                f"{row.label:<16}{r.sad:>10.4f}{r.mse:>10.5f}{r.grad:>10.4f}{r.conn:>10.4f}   {ref}"
            )
        return "\n".join(lines)
