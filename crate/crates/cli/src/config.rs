//! Run configuration file (TOML) and its merge with command-line flags.

use std::path::Path;

use clap::ValueEnum;
use las_core::generators::LlmEndpointConfig;
use las_core::search::SearchConfig;
use las_core::tasks::{TaskKind, TaskParams, TaskSpec};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    Mock,
    Llm,
}

/// On-disk configuration. Every section is optional; missing values take
/// the library defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    pub task: Option<TaskSpec>,
    #[serde(default)]
    pub search: SearchConfig,
    #[serde(default = "default_generator")]
    pub generator: GeneratorKind,
    pub llm: Option<LlmEndpointConfig>,
}

fn default_generator() -> GeneratorKind {
    GeneratorKind::Mock
}

impl Default for RunConfigFile {
    fn default() -> Self {
        RunConfigFile {
            task: None,
            search: SearchConfig::default(),
            generator: default_generator(),
            llm: None,
        }
    }
}

impl RunConfigFile {
    pub fn parse(text: &str) -> Result<RunConfigFile, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config file: {e}")))
    }

    pub fn load(path: &Path) -> Result<RunConfigFile, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        RunConfigFile::parse(&text)
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub task: Option<TaskKind>,
    pub generator: Option<GeneratorKind>,
    pub pop_size: Option<usize>,
    pub budget: Option<usize>,
    pub seed: Option<u64>,
    pub llm_base_url: Option<String>,
    pub llm_model: Option<String>,
}

/// Fully resolved and validated run settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedRun {
    pub task: TaskSpec,
    pub search: SearchConfig,
    pub generator: GeneratorKind,
    pub llm: Option<LlmEndpointConfig>,
}

/// Applies flags over the file. A task flag of a different kind than the
/// file's replaces its parameters with that kind's defaults; `--seed` seeds
/// both the search and the instance generator.
pub fn resolve(file: RunConfigFile, o: &Overrides) -> Result<ResolvedRun, CliError> {
    let mut task = match (file.task, o.task) {
        (Some(t), Some(kind)) if t.kind() != kind => TaskSpec {
            params: TaskParams::default_for(kind),
            ..t
        },
        (Some(t), _) => t,
        (None, Some(kind)) => TaskSpec::new(kind, 0),
        (None, None) => {
            return Err(CliError::Usage(
                "no task given (use --task or a [task] section)".into(),
            ))
        }
    };
    let mut search = file.search;
    if let Some(n) = o.pop_size {
        search.pop_size = n;
    }
    if let Some(n) = o.budget {
        search.budget = n;
    }
    if let Some(s) = o.seed {
        search.master_seed = s;
        task.seed = s;
    }
    let generator = o.generator.unwrap_or(file.generator);
    let mut llm = file.llm;
    if o.llm_base_url.is_some() || o.llm_model.is_some() {
        let mut cfg = llm.unwrap_or_else(|| LlmEndpointConfig::new("", ""));
        if let Some(u) = &o.llm_base_url {
            cfg.base_url = u.clone();
        }
        if let Some(m) = &o.llm_model {
            cfg.model = m.clone();
        }
        llm = Some(cfg);
    }

    search
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    task.validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    if generator == GeneratorKind::Llm {
        let cfg = llm.as_ref().ok_or_else(|| {
            CliError::Usage("the llm generator needs --llm-base-url and --llm-model".into())
        })?;
        cfg.validate().map_err(CliError::Usage)?;
    }
    Ok(ResolvedRun {
        task,
        search,
        generator,
        llm,
    })
}
