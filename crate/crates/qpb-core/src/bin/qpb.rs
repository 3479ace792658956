fn main() {
    std::process::exit(qpb_core::cli::main());
}
