//! The three CSV studies driven from code instead of the `lbb` binary.
//!
//! cargo run --release --example study_csv

use lbb_lab::fem::ElementPair;
use lbb_lab::study::{cmd_constants, cmd_eps_sweep, cmd_fortin_study, StudyConfig, TestField};

fn main() {
    let config = StudyConfig {
        elements: vec![ElementPair::TaylorHood, ElementPair::EqualOrder],
        levels: vec![4, 8],
        eps_grid: vec![1e-2, 1.0],
        limit_probes: true,
        fields: vec![TestField::VStar, TestField::Interpolant],
        ..StudyConfig::default()
    };
    config.validate().unwrap();
    for table in [cmd_constants(&config), cmd_eps_sweep(&config), cmd_fortin_study(&config)] {
        print!("{}", table.to_csv());
        println!();
    }
}
