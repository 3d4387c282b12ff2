macro_rules! example {
    ($name:ident, $path:literal, $($needle:literal),+) => {
        mod $name {
            #![allow(dead_code)]
            include!($path);

            #[test]
            fn runs() {
                let out = run_example().unwrap();
                $(assert!(out.contains($needle), "missing {:?} in\n{}", $needle, out);)+
            }
        }
    };
}

example!(coherence_decay, "../examples/coherence_decay.rs", "growing blocks");
example!(distillation_threshold, "../examples/distillation_threshold.rs", "m =  1: largest N with F > 1/2 is 22", "F(N=1e12, m=10, p=0.9) = 0.576");
example!(negativity_decay, "../examples/negativity_decay.rs", "m = 3");
example!(fisher_metrology, "../examples/fisher_metrology.rs", "dtheta");
example!(circuit_synthesis, "../examples/circuit_synthesis.rs", "N=4 m=2: 5 MS, 3 Z layers, MS phase 1/2pi, block pattern true, fidelity 1.000000000000", "QUBITS 4");
example!(random_pairs, "../examples/random_pairs.rs", "m = 3", "exceeding 0");
example!(oracle_certification, "../examples/oracle_certification.rs", "N=4 m=2");
example!(cli_sweep, "../examples/cli_sweep.rs", "exit code 0", "# fit");
example!(dfs_encoding, "../examples/dfs_encoding.rs", "DFS pair");
