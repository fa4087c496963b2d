//! Writes every chart of the built-in battery as a chart file.
//!
//! ```text
//! cargo run -p lcext-cli --example export_battery -- charts/
//! ```

use std::path::PathBuf;

use lcext::battery::battery;
use lcext::snc_model::Terms;
use lcext_cli::chart_file::{write_chart, ChartData};

fn main() -> std::io::Result<()> {
    let dir = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "charts".to_string()),
    );
    std::fs::create_dir_all(&dir)?;
    for case in battery() {
        let data = ChartData {
            chart: case.chart.clone(),
            sections: case.section.terms().to_vec(),
        };
        let path = dir.join(format!("{}.toml", case.name));
        std::fs::write(&path, write_chart(&data))?;
        println!("{}", path.display());
    }
    Ok(())
}
