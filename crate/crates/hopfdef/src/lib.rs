pub mod exact_linalg;
pub mod tensor_calculus;
pub mod hopf_structures;
pub mod complexes;
pub mod cohomology_cup;
pub mod deformation;
pub mod cli;
