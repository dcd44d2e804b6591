auto trained = b2g::policy::train([&](std::uint64_t) { return environment; }, spec.trainer);
auto policy = b2g::policy::DroopPolicy{trained.best};
