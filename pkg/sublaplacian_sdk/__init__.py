from sublaplacian_sdk.sublaplacian import SubLaplacian
