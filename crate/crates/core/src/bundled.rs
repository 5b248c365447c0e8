//! Data files compiled into the crate so every stage works without external
//! paths. Each can be overridden through the generation config.

pub const HIERARCHY_EDGES: &str = include_str!("../data/hierarchy.tsv");
pub const COLOR_CATALOG: &str = include_str!("../data/colors.csv");
pub const TEMPLATE_REGISTRY: &str = include_str!("../data/registry.tmpl");
pub const ANNOTATION_SCHEMA: &str = include_str!("../data/annotation.xsd");

pub const REAL_WORLD_TABLES: &[(&str, &str)] = &[
    ("annual_rainfall.csv", include_str!("../data/real_world/annual_rainfall.csv")),
    ("energy_use.csv", include_str!("../data/real_world/energy_use.csv")),
    ("export_volume.csv", include_str!("../data/real_world/export_volume.csv")),
    ("internet_users.csv", include_str!("../data/real_world/internet_users.csv")),
    ("life_expectancy.csv", include_str!("../data/real_world/life_expectancy.csv")),
    ("urban_population_share.csv", include_str!("../data/real_world/urban_population_share.csv")),
];

pub const IMAGE_POOL: &[(&str, &str)] = &[
    ("coastline.svg", include_str!("../data/image_pool/coastline.svg")),
    ("harbor.svg", include_str!("../data/image_pool/harbor.svg")),
    ("meadow.svg", include_str!("../data/image_pool/meadow.svg")),
    ("orchard.svg", include_str!("../data/image_pool/orchard.svg")),
    ("skyline.svg", include_str!("../data/image_pool/skyline.svg")),
    ("workshop.svg", include_str!("../data/image_pool/workshop.svg")),
];
