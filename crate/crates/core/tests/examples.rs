macro_rules! example {
    ($module:ident, $file:literal, $test:ident) => {
        #[allow(dead_code)]
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $test() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example!(earliest_arrival, "earliest_arrival.rs", earliest_arrival_example_runs);
example!(profile, "profile.rs", profile_example_runs);
example!(multicriteria, "multicriteria.rs", multicriteria_example_runs);
example!(location_to_location, "location_to_location.rs", location_example_runs);
example!(transfer_times, "transfer_times.rs", transfer_times_example_runs);
example!(synthetic_bench, "synthetic_bench.rs", synthetic_bench_example_runs);
example!(label_store, "label_store.rs", label_store_example_runs);
