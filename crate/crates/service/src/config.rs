use std::net::SocketAddr;
use std::path::PathBuf;

use clap::Parser;

/// HTTP service for adaptive questionnaires.
#[derive(Debug, Clone, Parser)]
#[command(name = "quizbn-service", version)]
pub struct Config {
    /// Address to listen on.
    #[arg(long, env = "QUIZBN_LISTEN", default_value = "127.0.0.1:8080")]
    pub listen: SocketAddr,

    /// Directory for `surveys.jsonl` and `sessions.jsonl`. Without it
    /// everything is kept in memory.
    #[arg(long, env = "QUIZBN_STORE")]
    pub store: Option<PathBuf>,

    /// Origins allowed by CORS, comma separated. `*` allows any origin.
    #[arg(long = "cors-origin", env = "QUIZBN_CORS_ORIGINS", value_delimiter = ',')]
    pub cors_origins: Vec<String>,
}
