"""biaslens: measure demographic bias in labeled datasets.

Representational metrics quantify how evenly demographic groups are
represented; stereotypical metrics quantify the association between a
demographic component and the target label, globally and per subgroup.
"""

from .agreement import (
    AgreementMatrix,
    local_agreement,
    metric_agreement,
    rank_with_ties,
    spearman_rho,
)
from .core import (
    ContingencyTable,
    DemographicSchema,
    MetricValue,
    PopulationProfile,
    ValidationError,
    represented_groups,
    validate_profile,
    validate_table,
)
from .ingest import (
    DatasetEntry,
    DatasetManifest,
    SampleRecord,
    build_contingency,
    build_profile,
    default_schema,
    load_manifest,
    load_sample_records,
    load_table_csv,
)
from .local_bias import LocalBiasMatrix, duchers_z_matrix, npmi_matrix
from .report import (
    ReportGrid,
    annotate_strength,
    build_grid,
    emit,
    emit_heatmap_svg,
    normalize_rows,
    rank_entities,
    to_bias_form,
)
from .representational import (
    all_representational,
    berger_parker,
    effective_number_of_species,
    inverse_imbalance_ratio,
    normalized_std,
    richness,
    shannon_entropy,
    shannon_evenness,
    simpson_family,
)
from .stereotypical import (
    BiasStrength,
    all_stereotypical,
    chi_squared,
    classify_cramers_v,
    conditional_entropy,
    cramers_v,
    degrees_of_freedom,
    marginal_entropy,
    normalized_mutual_information,
    pearson_contingency,
    theils_u,
    tschuprow_t,
)
from .synth import SynthSpec, random_profile, random_table

__version__ = "0.1.0"

__all__ = [
    "AgreementMatrix",
    "BiasStrength",
    "ContingencyTable",
    "DatasetEntry",
    "DatasetManifest",
    "DemographicSchema",
    "LocalBiasMatrix",
    "MetricValue",
    "PopulationProfile",
    "ReportGrid",
    "SampleRecord",
    "SynthSpec",
    "ValidationError",
    "all_representational",
    "all_stereotypical",
    "annotate_strength",
    "berger_parker",
    "build_contingency",
    "build_grid",
    "build_profile",
    "chi_squared",
    "classify_cramers_v",
    "conditional_entropy",
    "cramers_v",
    "default_schema",
    "degrees_of_freedom",
    "duchers_z_matrix",
    "effective_number_of_species",
    "emit",
    "emit_heatmap_svg",
    "inverse_imbalance_ratio",
    "load_manifest",
    "load_sample_records",
    "load_table_csv",
    "local_agreement",
    "marginal_entropy",
    "metric_agreement",
    "normalize_rows",
    "normalized_mutual_information",
    "normalized_std",
    "npmi_matrix",
    "pearson_contingency",
    "random_profile",
    "random_table",
    "rank_entities",
    "rank_with_ties",
    "represented_groups",
    "richness",
    "shannon_entropy",
    "shannon_evenness",
    "simpson_family",
    "spearman_rho",
    "theils_u",
    "to_bias_form",
    "tschuprow_t",
    "validate_profile",
    "validate_table",
]
