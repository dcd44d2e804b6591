auto policy = b2g::policy::NoControlPolicy{};
