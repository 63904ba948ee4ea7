fn main() {
    std::process::exit(coherent_capm::workbench::run(std::env::args_os()));
}
