pub mod cli;
pub mod experiment;
pub mod perspectives;
pub mod reasoning;
pub mod statevec;
pub mod stream;
