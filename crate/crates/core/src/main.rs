fn main() -> std::process::ExitCode {
    dualshift::cli::main()
}
